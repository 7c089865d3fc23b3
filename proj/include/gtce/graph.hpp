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

#ifndef GTCE_GRAPH_HPP_
#define GTCE_GRAPH_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gtce {

/// Label of the non-emitting start/end nodes.
inline constexpr int kNonEmitting = -1;

/// Blank label index, by convention (graph builders and decoder).
inline constexpr int kBlankLabel = 0;

struct GraphNode {
  int id = 0;
  int label = kNonEmitting;  // alphabet index, or kNonEmitting

  bool emitting() const { return label != kNonEmitting; }
  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  int src = 0;
  int dst = 0;
  double weight = 1.0;       // static weight, >= 0
  int transition_class = 0;  // index into the transition class set

  bool operator==(const GraphEdge&) const = default;
};

/// Supervision graph: node 0 is the non-emitting start, the last node the
/// non-emitting end, everything between emits a label. Edges are monotone
/// in node id (self-loops allowed on emitting nodes) and carry a static
/// weight plus a transition class. Immutable by convention once built.
struct LabelGraph {
  int num_labels = 0;       // alphabet size, blank included
  int num_transitions = 0;  // transition class count
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_emitting() const { return num_nodes() - 2; }
  int start_node() const { return 0; }
  int end_node() const { return num_nodes() - 1; }

  bool operator==(const LabelGraph&) const = default;
};

/// One token activation: token `token` of speaker `speaker` starts at
/// frame `frame`.
struct AlignmentEvent {
  int frame = 0;
  int token = 0;  // non-blank alphabet index
  int speaker = 0;

  bool operator==(const AlignmentEvent&) const = default;
};

/// Outcome of validate_graph. Violations are data, not errors; each entry
/// names the offending node or edge.
struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks every LabelGraph invariant: non-emitting endpoints, monotone
/// edges, no edges into start / out of end, no duplicate or dangling
/// edges, finite nonnegative weights, class indices in range, and that
/// every emitting node lies on some start-to-end path.
ValidationReport validate_graph(const LabelGraph& g);

/// Canonical CTC supervision graph over `labels` (non-blank indices):
/// optional blanks between labels, mandatory blank between equal
/// neighbours, self-loops on every emitting node. Every edge carries
/// `transition_class` and weight 1. `num_transitions` defaults to
/// transition_class + 1.
LabelGraph build_ctc_graph(std::span<const int> labels, int num_labels,
                           int transition_class = 0, int num_transitions = 0);

/// Linear multi-speaker graph: per-speaker events are merged in global
/// frame order (ties go to the higher-energy speaker), shared optional
/// blanks are interleaved CTC-style, and each token node's incoming edges
/// carry its speaker as transition class. Blank nodes and edges into the
/// end node carry the dedicated blank class S (so num_transitions = S+1).
LabelGraph build_multispeaker_graph(
    const std::vector<std::vector<AlignmentEvent>>& events_per_speaker,
    std::span<const double> energies, int num_labels);

/// All node sequences (start, pi_1..pi_T, end) through `g` with exactly T
/// emitting steps. Test-scale only: throws NumericError once more than
/// `cap` paths would be produced.
std::vector<std::vector<int>> unfold_paths(const LabelGraph& g, int frames,
                                           std::size_t cap = 1000000);

// Graph file: one JSON object, fixed key order, round-trip identity on
// valid graphs. deserialize_graph validates and throws InputError on
// schema or invariant violations.
std::string serialize_graph(const LabelGraph& g);
LabelGraph deserialize_graph(std::string_view text);

LabelGraph load_graph(const std::string& path);
void save_graph(const std::string& path, const LabelGraph& g);

}  // namespace gtce

#endif  // GTCE_GRAPH_HPP_
