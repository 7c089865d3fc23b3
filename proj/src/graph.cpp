// Copyright 2026 The GTCE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gtce/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gtce/align.hpp"
#include "gtce/error.hpp"

namespace gtce {

namespace {

std::string edge_str(const GraphEdge& e) {
  return "(" + std::to_string(e.src) + "->" + std::to_string(e.dst) + ")";
}

}  // namespace

ValidationReport validate_graph(const LabelGraph& g) {
  ValidationReport rep;
  auto bad = [&rep](std::string msg) { rep.violations.push_back(std::move(msg)); };

  const int n = g.num_nodes();
  if (n < 2) {
    bad("graph needs at least the start and end nodes");
    return rep;
  }
  if (g.num_labels < 1) bad("num_labels must be >= 1");
  if (g.num_transitions < 1) bad("num_transitions must be >= 1");

  for (int i = 0; i < n; ++i) {
    const GraphNode& node = g.nodes[i];
    if (node.id != i) {
      bad("node at position " + std::to_string(i) + " has id " +
          std::to_string(node.id) + ": ids must be 0..G+1 in order");
    }
    const bool endpoint = (i == 0 || i == n - 1);
    if (endpoint && node.emitting()) {
      bad("node " + std::to_string(i) + ": start/end must be non-emitting");
    }
    if (!endpoint && !node.emitting()) {
      bad("node " + std::to_string(i) + ": interior node must be emitting");
    }
    if (node.emitting() && (node.label < 0 || node.label >= g.num_labels)) {
      bad("node " + std::to_string(i) + ": label out of range");
    }
  }

  std::set<std::pair<int, int>> seen;
  for (const GraphEdge& e : g.edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      bad("edge " + edge_str(e) + ": dangling endpoint");
      continue;
    }
    if (e.dst == 0) bad("edge " + edge_str(e) + ": edge enters start node");
    if (e.src == n - 1) bad("edge " + edge_str(e) + ": edge leaves end node");
    if (e.src > e.dst) bad("edge " + edge_str(e) + ": non-monotone edge");
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      bad("edge " + edge_str(e) + ": weight must be finite and >= 0");
    }
    if (e.transition_class < 0 || e.transition_class >= g.num_transitions) {
      bad("edge " + edge_str(e) + ": transition class out of range");
    }
    if (!seen.insert({e.src, e.dst}).second) {
      bad("edge " + edge_str(e) +
          ": duplicate edge (weight and class must be unique per node pair)");
    }
  }
  if (!rep.ok()) return rep;

  // Every emitting node must lie on a start->end path.
  std::vector<char> fwd(n, 0), bwd(n, 0);
  fwd[0] = 1;
  bwd[n - 1] = 1;
  // Monotone ids make one id-ordered sweep per direction sufficient.
  std::vector<std::vector<int>> out(n), in(n);
  for (const GraphEdge& e : g.edges) {
    out[e.src].push_back(e.dst);
    in[e.dst].push_back(e.src);
  }
  for (int v = 0; v < n; ++v) {
    if (!fwd[v]) continue;
    for (int w : out[v]) fwd[w] = 1;
  }
  for (int v = n - 1; v >= 0; --v) {
    if (!bwd[v]) continue;
    for (int u : in[v]) bwd[u] = 1;
  }
  for (int v = 1; v < n - 1; ++v) {
    if (!fwd[v] || !bwd[v]) {
      bad("node " + std::to_string(v) + ": not on any start->end path");
    }
  }
  return rep;
}

namespace {

void require_valid(const LabelGraph& g, const char* who) {
  ValidationReport rep = validate_graph(g);
  if (!rep.ok()) {
    std::string msg = std::string(who) + " produced/received an invalid graph:";
    for (const std::string& v : rep.violations) msg += "\n  " + v;
    throw InputError(msg);
  }
}

// The shared interleaved-blank chain: start, blank0, q1, blank1, ..., qM,
// blankM, end. tokens[j] and classes[j] describe q_{j+1}; blank edges and
// nodes take blank_class. Skip edges q_j -> q_{j+1} appear unless the two
// token nodes are indistinguishable (same label and class).
LabelGraph build_token_chain(std::span<const int> tokens,
                             std::span<const int> classes, int num_labels,
                             int num_transitions, int blank_class) {
  const int m = static_cast<int>(tokens.size());
  LabelGraph g;
  g.num_labels = num_labels;
  g.num_transitions = num_transitions;

  const auto token_node = [](int j) { return 2 * j; };        // j = 1..m
  const auto blank_node = [](int i) { return 2 * i + 1; };    // i = 0..m
  const int end = 2 * m + 2;

  g.nodes.push_back({0, kNonEmitting});
  g.nodes.push_back({blank_node(0), kBlankLabel});
  for (int j = 1; j <= m; ++j) {
    g.nodes.push_back({token_node(j), tokens[j - 1]});
    g.nodes.push_back({blank_node(j), kBlankLabel});
  }
  g.nodes.push_back({end, kNonEmitting});

  auto add = [&g](int src, int dst, int cls) {
    g.edges.push_back({src, dst, 1.0, cls});
  };

  add(0, blank_node(0), blank_class);
  if (m >= 1) add(0, token_node(1), classes[0]);
  for (int i = 0; i <= m; ++i) add(blank_node(i), blank_node(i), blank_class);
  for (int j = 1; j <= m; ++j) {
    add(token_node(j), token_node(j), classes[j - 1]);
    add(blank_node(j - 1), token_node(j), classes[j - 1]);
    add(token_node(j), blank_node(j), blank_class);
    if (j < m && (tokens[j - 1] != tokens[j] ||
                  classes[j - 1] != classes[j])) {
      add(token_node(j), token_node(j + 1), classes[j]);
    }
  }
  if (m >= 1) add(token_node(m), end, blank_class);
  add(blank_node(m), end, blank_class);

  std::sort(g.edges.begin(), g.edges.end(), [](const auto& a, const auto& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });
  return g;
}

}  // namespace

LabelGraph build_ctc_graph(std::span<const int> labels, int num_labels,
                           int transition_class, int num_transitions) {
  if (labels.empty()) throw InputError("build_ctc_graph: empty label sequence");
  if (num_transitions == 0) num_transitions = transition_class + 1;
  if (transition_class < 0 || transition_class >= num_transitions) {
    throw InputError("build_ctc_graph: transition class out of range");
  }
  for (int l : labels) {
    if (l <= kBlankLabel || l >= num_labels) {
      throw InputError("build_ctc_graph: label " + std::to_string(l) +
                       " out of range (must be non-blank and < num_labels)");
    }
  }
  std::vector<int> classes(labels.size(), transition_class);
  // Single-class chain: the blank edges carry the same class.
  LabelGraph g = build_token_chain(labels, classes, num_labels,
                                   num_transitions, transition_class);
  require_valid(g, "build_ctc_graph");
  return g;
}

LabelGraph build_multispeaker_graph(
    const std::vector<std::vector<AlignmentEvent>>& events_per_speaker,
    std::span<const double> energies, int num_labels) {
  const int S = static_cast<int>(events_per_speaker.size());
  if (S < 1) throw InputError("build_multispeaker_graph: need >= 1 speaker");
  if (static_cast<int>(energies.size()) != S) {
    throw InputError("build_multispeaker_graph: one energy per speaker");
  }
  for (int s = 0; s < S; ++s) {
    for (const AlignmentEvent& e : events_per_speaker[s]) {
      if (e.token <= kBlankLabel || e.token >= num_labels) {
        throw InputError("build_multispeaker_graph: token " +
                         std::to_string(e.token) + " out of range");
      }
    }
  }

  const std::vector<AlignmentEvent> merged =
      merge_alignments(events_per_speaker, energies);

  std::vector<int> tokens, classes;
  tokens.reserve(merged.size());
  classes.reserve(merged.size());
  for (const AlignmentEvent& e : merged) {
    tokens.push_back(e.token);
    classes.push_back(e.speaker);
  }
  const int blank_class = S;
  LabelGraph g =
      build_token_chain(tokens, classes, num_labels, S + 1, blank_class);
  require_valid(g, "build_multispeaker_graph");
  return g;
}

std::vector<std::vector<int>> unfold_paths(const LabelGraph& g, int frames,
                                           std::size_t cap) {
  if (frames < 1) throw InputError("unfold_paths: need frames >= 1");
  require_valid(g, "unfold_paths");

  const int n = g.num_nodes();
  const int end = g.end_node();
  std::vector<std::vector<int>> out_emitting(n);
  std::vector<char> has_end_edge(n, 0);
  for (const GraphEdge& e : g.edges) {
    if (e.dst == end) {
      has_end_edge[e.src] = 1;
    } else {
      out_emitting[e.src].push_back(e.dst);
    }
  }

  std::vector<std::vector<int>> paths;
  std::vector<int> cur;
  cur.reserve(frames + 2);
  cur.push_back(g.start_node());

  auto dfs = [&](auto&& self, int depth) -> void {
    const int at = cur.back();
    if (depth == frames) {
      if (has_end_edge[at]) {
        if (paths.size() >= cap) {
          throw NumericError("unfold_paths: more than " + std::to_string(cap) +
                             " paths");
        }
        std::vector<int> full = cur;
        full.push_back(end);
        paths.push_back(std::move(full));
      }
      return;
    }
    for (int v : out_emitting[at]) {
      cur.push_back(v);
      self(self, depth + 1);
      cur.pop_back();
    }
  };
  dfs(dfs, 0);
  return paths;
}

std::string serialize_graph(const LabelGraph& g) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["num_labels"] = g.num_labels;
  j["num_transitions"] = g.num_transitions;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const GraphNode& n : g.nodes) {
    j["nodes"].push_back({{"id", n.id}, {"label", n.label}});
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const GraphEdge& e : g.edges) {
    j["edges"].push_back({{"src", e.src},
                          {"dst", e.dst},
                          {"w", e.weight},
                          {"trans", e.transition_class}});
  }
  return j.dump();
}

LabelGraph deserialize_graph(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("graph file: ") + e.what());
  }
  try {
    if (!j.is_object()) throw InputError("graph file: not a JSON object");
    if (j.value("version", 0) != 1) {
      throw InputError("graph file: missing or unsupported version");
    }
    for (const char* key : {"num_labels", "num_transitions", "nodes", "edges"}) {
      if (!j.contains(key)) {
        throw InputError(std::string("graph file: missing field '") + key + "'");
      }
    }
    LabelGraph g;
    g.num_labels = j.at("num_labels").get<int>();
    g.num_transitions = j.at("num_transitions").get<int>();
    std::set<int> ids;
    for (const auto& n : j.at("nodes")) {
      GraphNode node{n.at("id").get<int>(), n.at("label").get<int>()};
      if (!ids.insert(node.id).second) {
        throw InputError("graph file: duplicate node id " +
                         std::to_string(node.id));
      }
      g.nodes.push_back(node);
    }
    std::sort(g.nodes.begin(), g.nodes.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& e : j.at("edges")) {
      g.edges.push_back({e.at("src").get<int>(), e.at("dst").get<int>(),
                         e.at("w").get<double>(), e.at("trans").get<int>()});
    }
    ValidationReport rep = validate_graph(g);
    if (!rep.ok()) {
      std::string msg = "graph file: invariant violations:";
      for (const std::string& v : rep.violations) msg += "\n  " + v;
      throw InputError(msg);
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("graph file: ") + e.what());
  }
}

LabelGraph load_graph(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open graph file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return deserialize_graph(buf.str());
}

void save_graph(const std::string& path, const LabelGraph& g) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write graph file: " + path);
  f << serialize_graph(g) << "\n";
}

}  // namespace gtce
