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

#include "gtce/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gtce/error.hpp"

namespace gtce {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

FrameAlignment viterbi_align(const LabelGraph& g, const PosteriorSequence& p,
                             int blank_label) {
  ValidationReport rep = validate_graph(g);
  if (!rep.ok()) throw InputError("viterbi_align: invalid graph");
  if (p.label_post.cols() != static_cast<std::size_t>(g.num_labels) ||
      p.trans_post.cols() != static_cast<std::size_t>(g.num_transitions) ||
      p.frames() == 0 || p.frames() != p.trans_post.rows()) {
    throw InputError("viterbi_align: posterior dimensions do not match graph");
  }

  const std::size_t T = p.frames();
  const int n = g.num_nodes();
  const int end = g.end_node();

  struct InArc {
    int src;
    double log_weight;
    int cls;
  };
  std::vector<std::vector<InArc>> incoming(n);
  std::vector<double> log_end_weight(n, kNegInf);
  for (const GraphEdge& e : g.edges) {
    if (e.dst == end) {
      log_end_weight[e.src] = std::log(e.weight);
    } else {
      incoming[e.dst].push_back({e.src, std::log(e.weight),
                                 e.transition_class});
    }
  }

  // Max-product sweep with backpointers.
  Matrix best(T + 1, n, kNegInf);
  std::vector<std::vector<int>> back(T + 1, std::vector<int>(n, -1));
  best(0, 0) = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    for (int v = 1; v < n - 1; ++v) {
      double top = kNegInf;
      int arg = -1;
      for (const InArc& a : incoming[v]) {
        const double prev = best(t - 1, a.src);
        if (prev == kNegInf) continue;
        const double cand =
            prev + a.log_weight + std::log(p.trans_post(t - 1, a.cls));
        if (cand > top) {
          top = cand;
          arg = a.src;
        }
      }
      if (arg < 0) continue;
      best(t, v) = top + std::log(p.label_post(t - 1, g.nodes[v].label));
      back[t][v] = arg;
    }
  }

  double top = kNegInf;
  int last = -1;
  for (int v = 1; v < n - 1; ++v) {
    if (log_end_weight[v] == kNegInf || best(T, v) == kNegInf) continue;
    const double cand = best(T, v) + log_end_weight[v];
    if (cand > top) {
      top = cand;
      last = v;
    }
  }
  if (last < 0) {
    throw NumericError("viterbi_align: no positive-probability path");
  }

  FrameAlignment out;
  out.log_prob = top;
  out.node_path.resize(T);
  for (std::size_t t = T; t >= 1; --t) {
    out.node_path[t - 1] = last;
    last = back[t][last];
  }
  for (std::size_t t = 0; t < T; ++t) {
    const int node = out.node_path[t];
    const int label = g.nodes[node].label;
    if (label == blank_label) continue;
    if (t == 0 || out.node_path[t - 1] != node) {
      out.onsets.push_back({static_cast<int>(t), label});
    }
  }
  return out;
}

std::vector<AlignmentEvent> to_events(std::span<const TokenOnset> onsets,
                                      int speaker) {
  std::vector<AlignmentEvent> out;
  out.reserve(onsets.size());
  for (const TokenOnset& o : onsets) out.push_back({o.frame, o.token, speaker});
  return out;
}

std::vector<AlignmentEvent> merge_alignments(
    const std::vector<std::vector<AlignmentEvent>>& per_speaker,
    std::span<const double> energies) {
  const int S = static_cast<int>(per_speaker.size());
  if (static_cast<int>(energies.size()) != S) {
    throw InputError("merge_alignments: one energy per speaker");
  }
  std::vector<AlignmentEvent> merged;
  for (int s = 0; s < S; ++s) {
    int prev_frame = -1;
    for (const AlignmentEvent& e : per_speaker[s]) {
      if (e.speaker != s) {
        throw InputError("merge_alignments: event for speaker " +
                         std::to_string(e.speaker) + " in list " +
                         std::to_string(s));
      }
      if (e.frame < 0 || e.frame < prev_frame) {
        throw InputError("merge_alignments: speaker " + std::to_string(s) +
                         " events are not frame-sorted");
      }
      prev_frame = e.frame;
      merged.push_back(e);
    }
  }
  // Chronological order; same-frame ties go to the higher-energy speaker
  // (stable, so equal energies fall back to speaker index order).
  std::stable_sort(merged.begin(), merged.end(),
                   [&](const AlignmentEvent& a, const AlignmentEvent& b) {
                     if (a.frame != b.frame) return a.frame < b.frame;
                     return energies[a.speaker] > energies[b.speaker];
                   });
  return merged;
}

double concurrency_rate(
    const std::vector<std::vector<AlignmentEvent>>& per_speaker) {
  if (per_speaker.size() < 2) {
    throw InputError("concurrency_rate: need at least two speakers");
  }
  std::vector<std::set<int>> frames(per_speaker.size());
  std::size_t total = 0;
  for (std::size_t s = 0; s < per_speaker.size(); ++s) {
    for (const AlignmentEvent& e : per_speaker[s]) frames[s].insert(e.frame);
    total += per_speaker[s].size();
  }
  if (total == 0) return 0.0;
  std::size_t concurrent = 0;
  for (std::size_t s = 0; s < per_speaker.size(); ++s) {
    for (const AlignmentEvent& e : per_speaker[s]) {
      for (std::size_t o = 0; o < per_speaker.size(); ++o) {
        if (o != s && frames[o].count(e.frame)) {
          ++concurrent;
          break;
        }
      }
    }
  }
  return static_cast<double>(concurrent) / static_cast<double>(total);
}

}  // namespace gtce
