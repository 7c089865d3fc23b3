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
#include <random>
#include <set>

#include <doctest.h>

#include "gtce/error.hpp"
#include "test_support.hpp"

using namespace gtce;

namespace {

// start -> a -> end, a optionally self-looping.
LabelGraph single_node_graph(bool self_loop) {
  LabelGraph g;
  g.num_labels = 2;
  g.num_transitions = 1;
  g.nodes = {{0, kNonEmitting}, {1, 1}, {2, kNonEmitting}};
  g.edges = {{0, 1, 1.0, 0}, {1, 2, 1.0, 0}};
  if (self_loop) g.edges.insert(g.edges.begin() + 1, {1, 1, 1.0, 0});
  return g;
}

bool mentions(const ValidationReport& rep, const std::string& needle) {
  return std::any_of(rep.violations.begin(), rep.violations.end(),
                     [&](const std::string& v) {
                       return v.find(needle) != std::string::npos;
                     });
}

// CTC collapse of a path's label sequence: merge repeats, drop blanks.
std::vector<int> collapse_path(const LabelGraph& g,
                               const std::vector<int>& path) {
  std::vector<int> out;
  int prev_node = -1;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    const int node = path[i];
    const int label = g.nodes[node].label;
    if (node != prev_node && label != kBlankLabel) out.push_back(label);
    prev_node = node;
  }
  return out;
}

}  // namespace

TEST_CASE("validate_graph accepts a minimal legal graph") {
  CHECK(validate_graph(single_node_graph(false)).ok());
  CHECK(validate_graph(single_node_graph(true)).ok());
}

TEST_CASE("validate_graph names each violation") {
  SUBCASE("edge leaves end node") {
    LabelGraph g = single_node_graph(false);
    g.edges.push_back({2, 2, 1.0, 0});
    const auto rep = validate_graph(g);
    CHECK_FALSE(rep.ok());
    CHECK(mentions(rep, "edge leaves end node"));
  }
  SUBCASE("non-monotone edge") {
    LabelGraph g;
    g.num_labels = 3;
    g.num_transitions = 1;
    g.nodes = {{0, kNonEmitting}, {1, 1}, {2, 2}, {3, kNonEmitting}};
    g.edges = {{0, 1, 1.0, 0}, {1, 2, 1.0, 0}, {2, 1, 1.0, 0},
               {2, 3, 1.0, 0}};
    const auto rep = validate_graph(g);
    CHECK_FALSE(rep.ok());
    CHECK(mentions(rep, "non-monotone edge"));
  }
  SUBCASE("edge enters start node") {
    LabelGraph g = single_node_graph(false);
    g.edges.push_back({0, 0, 1.0, 0});
    CHECK(mentions(validate_graph(g), "edge enters start node"));
  }
  SUBCASE("unreachable emitting node") {
    LabelGraph g;
    g.num_labels = 3;
    g.num_transitions = 1;
    g.nodes = {{0, kNonEmitting}, {1, 1}, {2, 2}, {3, kNonEmitting}};
    g.edges = {{0, 1, 1.0, 0}, {1, 3, 1.0, 0}, {2, 3, 1.0, 0}};
    CHECK(mentions(validate_graph(g), "not on any start->end path"));
  }
  SUBCASE("duplicate edge") {
    LabelGraph g = single_node_graph(false);
    g.edges.push_back({0, 1, 0.5, 0});
    CHECK(mentions(validate_graph(g), "duplicate edge"));
  }
  SUBCASE("bad weight") {
    LabelGraph g = single_node_graph(false);
    g.edges[0].weight = -1.0;
    CHECK(mentions(validate_graph(g), "weight"));
  }
  SUBCASE("transition class out of range") {
    LabelGraph g = single_node_graph(false);
    g.edges[0].transition_class = 7;
    CHECK(mentions(validate_graph(g), "transition class out of range"));
  }
}

TEST_CASE("build_ctc_graph produces the canonical topology") {
  SUBCASE("single label") {
    const std::vector<int> labels{1};
    const LabelGraph g = build_ctc_graph(labels, 2);
    CHECK(validate_graph(g).ok());
    // start, blank, token, blank, end
    REQUIRE(g.num_nodes() == 5);
    CHECK(g.nodes[1].label == kBlankLabel);
    CHECK(g.nodes[2].label == 1);
    CHECK(g.nodes[3].label == kBlankLabel);
    const bool self_loop = std::any_of(
        g.edges.begin(), g.edges.end(),
        [](const GraphEdge& e) { return e.src == 2 && e.dst == 2; });
    CHECK(self_loop);
    // blanks are optional: token node connects straight to start and end
    CHECK(std::any_of(g.edges.begin(), g.edges.end(), [](const GraphEdge& e) {
      return e.src == 0 && e.dst == 2;
    }));
    CHECK(std::any_of(g.edges.begin(), g.edges.end(), [](const GraphEdge& e) {
      return e.src == 2 && e.dst == 4;
    }));
  }
  SUBCASE("repeated label forces the separating blank") {
    const std::vector<int> labels{1, 1};
    const LabelGraph g = build_ctc_graph(labels, 2);
    CHECK(validate_graph(g).ok());
    // no skip edge between the two token nodes (2 and 4)
    CHECK(std::none_of(g.edges.begin(), g.edges.end(), [](const GraphEdge& e) {
      return e.src == 2 && e.dst == 4;
    }));
    // the only 3-frame path is token, blank, token
    const auto paths = unfold_paths(g, 3);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0] == std::vector<int>{0, 2, 3, 4, 6});
  }
  SUBCASE("distinct labels admit the blank skip") {
    const std::vector<int> labels{1, 2};
    const LabelGraph g = build_ctc_graph(labels, 3);
    for (const auto& path : unfold_paths(g, 4)) {
      CHECK(collapse_path(g, path) == labels);
    }
    CHECK(unfold_paths(g, 2).size() == 1);  // direct a -> b
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(build_ctc_graph(std::vector<int>{}, 3), InputError);
    CHECK_THROWS_AS(build_ctc_graph(std::vector<int>{0}, 3), InputError);
    CHECK_THROWS_AS(build_ctc_graph(std::vector<int>{5}, 3), InputError);
  }
}

TEST_CASE("build_ctc_graph paths always collapse to the input") {
  std::mt19937_64 rng(1234);
  for (int round = 0; round < 40; ++round) {
    const int num_labels = 2 + static_cast<int>(rng() % 3);  // 2..4
    const int len = 1 + static_cast<int>(rng() % 4);         // 1..4
    std::vector<int> labels(len);
    for (int& l : labels) l = 1 + static_cast<int>(rng() % (num_labels - 1));
    const LabelGraph g = build_ctc_graph(labels, num_labels);
    CHECK(validate_graph(g).ok());
    for (int frames = 1; frames <= 6; ++frames) {
      const auto paths = unfold_paths(g, frames);
      for (const auto& path : paths) {
        REQUIRE(collapse_path(g, path) == labels);
      }
      CHECK(paths.size() == testing::dp_path_count(g, frames));
    }
  }
}

TEST_CASE("build_multispeaker_graph merges events chronologically") {
  // speaker 0: A@2, B@5; speaker 1: C@3
  const std::vector<std::vector<AlignmentEvent>> events{
      {{2, 1, 0}, {5, 2, 0}}, {{3, 3, 1}}};
  const std::vector<double> energies{1.0, 0.5};
  const LabelGraph g = build_multispeaker_graph(events, energies, 4);
  CHECK(validate_graph(g).ok());
  CHECK(g.num_transitions == 3);  // 2 speakers + blank class

  // token nodes in id order carry A, C, B
  std::vector<int> tokens, classes;
  for (const GraphNode& n : g.nodes) {
    if (!n.emitting() || n.label == kBlankLabel) continue;
    tokens.push_back(n.label);
    for (const GraphEdge& e : g.edges) {
      if (e.dst == n.id && e.src != n.id) {
        classes.push_back(e.transition_class);
        break;
      }
    }
  }
  CHECK(tokens == std::vector<int>{1, 3, 2});
  CHECK(classes == std::vector<int>{0, 1, 0});
}

TEST_CASE("same-frame events go to the higher-energy speaker first") {
  const std::vector<std::vector<AlignmentEvent>> events{{{4, 1, 0}},
                                                        {{4, 3, 1}}};
  const std::vector<double> energies{0.3, 0.9};
  const LabelGraph g = build_multispeaker_graph(events, energies, 4);
  std::vector<int> tokens;
  for (const GraphNode& n : g.nodes) {
    if (n.emitting() && n.label != kBlankLabel) tokens.push_back(n.label);
  }
  CHECK(tokens == std::vector<int>{3, 1});  // speaker 1's C first
}

TEST_CASE("single-speaker graph matches the CTC topology up to classes") {
  const std::vector<std::vector<AlignmentEvent>> events{
      {{1, 1, 0}, {2, 2, 0}}};
  const std::vector<double> energies{1.0};
  const LabelGraph ms = build_multispeaker_graph(events, energies, 3);
  const LabelGraph ctc = build_ctc_graph(std::vector<int>{1, 2}, 3);

  CHECK(ms.nodes == ctc.nodes);
  REQUIRE(ms.edges.size() == ctc.edges.size());
  for (std::size_t i = 0; i < ms.edges.size(); ++i) {
    CHECK(ms.edges[i].src == ctc.edges[i].src);
    CHECK(ms.edges[i].dst == ctc.edges[i].dst);
    CHECK(ms.edges[i].weight == ctc.edges[i].weight);
  }
}

TEST_CASE("multispeaker graph restricted to one speaker recovers its events") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 20; ++round) {
    const int S = 2 + static_cast<int>(rng() % 2);
    std::vector<std::vector<AlignmentEvent>> events(S);
    std::vector<double> energies;
    for (int s = 0; s < S; ++s) {
      energies.push_back(0.1 + static_cast<double>(rng() % 100));
      int frame = static_cast<int>(rng() % 3);
      const int count = 1 + static_cast<int>(rng() % 3);
      for (int j = 0; j < count; ++j) {
        events[s].push_back({frame, 1 + static_cast<int>(rng() % 3), s});
        frame += 1 + static_cast<int>(rng() % 4);
      }
    }
    const LabelGraph g = build_multispeaker_graph(events, energies, 4);
    CHECK(validate_graph(g).ok());

    for (int s = 0; s < S; ++s) {
      std::vector<int> got;
      for (const GraphNode& n : g.nodes) {
        if (!n.emitting() || n.label == kBlankLabel) continue;
        for (const GraphEdge& e : g.edges) {
          if (e.dst == n.id && e.src != n.id && e.transition_class == s) {
            got.push_back(n.label);
            break;
          }
        }
      }
      std::vector<int> want;
      for (const AlignmentEvent& e : events[s]) want.push_back(e.token);
      CHECK(got == want);
    }
  }
}

TEST_CASE("build_multispeaker_graph validates its inputs") {
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(build_multispeaker_graph({}, {}, 3), InputError);
  CHECK_THROWS_AS(
      build_multispeaker_graph({{{0, 1, 1}}}, one, 3),  // speaker 1 in list 0
      InputError);
  CHECK_THROWS_AS(
      build_multispeaker_graph({{{5, 1, 0}, {2, 1, 0}}}, one, 3),  // unsorted
      InputError);
  CHECK_THROWS_AS(build_multispeaker_graph({{{0, 9, 0}}}, one, 3), InputError);
}

TEST_CASE("unfold_paths enumerates exactly the accepting node sequences") {
  SUBCASE("self-loop chain has a single path") {
    const LabelGraph g = single_node_graph(true);
    const auto paths = unfold_paths(g, 3);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0] == std::vector<int>{0, 1, 1, 1, 2});
  }
  SUBCASE("two branches at one frame") {
    LabelGraph g;
    g.num_labels = 3;
    g.num_transitions = 1;
    g.nodes = {{0, kNonEmitting}, {1, 1}, {2, 2}, {3, kNonEmitting}};
    g.edges = {{0, 1, 1.0, 0}, {0, 2, 1.0, 0}, {1, 3, 1.0, 0},
               {2, 3, 1.0, 0}};
    CHECK(unfold_paths(g, 1).size() == 2);
  }
  SUBCASE("ctc graph for one label at two frames") {
    const LabelGraph g = build_ctc_graph(std::vector<int>{1}, 2);
    const auto paths = unfold_paths(g, 2);
    CHECK(paths.size() == 3);  // aa, blank-a, a-blank
  }
  SUBCASE("count matches the dp oracle on random graphs") {
    std::mt19937_64 rng(4242);
    for (int round = 0; round < 30; ++round) {
      const auto inst = testing::random_instance(rng);
      CHECK(unfold_paths(inst.graph, inst.frames).size() ==
            testing::dp_path_count(inst.graph, inst.frames));
    }
  }
  SUBCASE("resource cap") {
    const LabelGraph g = build_ctc_graph(std::vector<int>{1, 2, 1}, 3);
    CHECK_THROWS_AS(unfold_paths(g, 8, 5), NumericError);
  }
  SUBCASE("frames must be positive") {
    CHECK_THROWS_AS(unfold_paths(single_node_graph(true), 0), InputError);
  }
}

TEST_CASE("graph serialization round-trips") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 25; ++round) {
    const auto inst = testing::random_instance(rng);
    const LabelGraph back = deserialize_graph(serialize_graph(inst.graph));
    CHECK(back == inst.graph);
  }
}

TEST_CASE("graph deserialization rejects bad documents") {
  const LabelGraph g = single_node_graph(true);
  const std::string good = serialize_graph(g);

  SUBCASE("missing num_transitions") {
    std::string doc = good;
    const auto pos = doc.find("\"num_transitions\":1,");
    REQUIRE(pos != std::string::npos);
    doc.erase(pos, std::string("\"num_transitions\":1,").size());
    CHECK_THROWS_AS(deserialize_graph(doc), InputError);
  }
  SUBCASE("duplicate node id") {
    std::string doc = good;
    const auto pos = doc.find("{\"id\":1,\"label\":1}");
    REQUIRE(pos != std::string::npos);
    doc.insert(pos, "{\"id\":1,\"label\":1},");
    CHECK_THROWS_AS(deserialize_graph(doc), InputError);
  }
  SUBCASE("not json") {
    CHECK_THROWS_AS(deserialize_graph("not json at all"), InputError);
  }
  SUBCASE("invariant violation") {
    LabelGraph bad = g;
    bad.edges.push_back({2, 2, 1.0, 0});
    CHECK_THROWS_AS(deserialize_graph(serialize_graph(bad)), InputError);
  }
}
