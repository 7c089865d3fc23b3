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

// Shared table of independent oracles and random-instance generators for
// the unit and acceptance suites. Everything here stays deliberately
// separate from the library's lattice code paths: counting is plain DP
// over adjacency, the CTC reference enumerates raw label sequences, and
// the decode oracle enumerates joint alignments.

#ifndef GTCE_TESTS_TEST_SUPPORT_HPP_
#define GTCE_TESTS_TEST_SUPPORT_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "gtce/decode.hpp"
#include "gtce/graph.hpp"
#include "gtce/loss.hpp"
#include "gtce/tensor.hpp"

namespace gtce::testing {

struct InstanceConfig {
  int max_emitting = 6;
  int max_labels = 4;
  int max_transitions = 3;
  int min_frames = 1;
  int max_frames = 8;
  double min_weight = 0.1;
  double max_weight = 2.0;
  bool unit_weights = false;
  std::size_t max_paths = 20000;  // keeps brute-force enumeration fast
};

struct Instance {
  LabelGraph graph;
  PosteriorSequence post;
  int frames = 0;
};

/// Random valid graph + normalized strictly positive posteriors with at
/// least one accepting path of the drawn length.
Instance random_instance(std::mt19937_64& rng, const InstanceConfig& cfg = {});

/// Random normalized strictly positive posterior matrix.
Matrix random_posterior_rows(std::mt19937_64& rng, int rows, int cols);

/// Random finite logits in [-2, 2].
Matrix random_logits(std::mt19937_64& rng, int rows, int cols);

/// Accepting-path count by dynamic programming over edge adjacency; the
/// oracle for unfold_paths' size.
std::uint64_t dp_path_count(const LabelGraph& g, int frames);

/// Textbook CTC negative log likelihood by enumerating every raw label
/// sequence of length T and collapsing (merge repeats, then drop blanks).
/// Independent of LabelGraph and of the lattice sweeps.
double ctc_reference_loss(const Matrix& label_post,
                          const std::vector<int>& target,
                          int blank = kBlankLabel);

/// Exact marginalized decode: enumerates every joint (label, class)
/// alignment, groups by collapsed (token, speaker) sequence, and returns
/// the argmax with its log probability.
struct OracleDecode {
  Prefix best;
  double log_prob = 0.0;
};
OracleDecode exhaustive_decode(const PosteriorSequence& p, int num_speakers);

/// A node re-indexing that preserves the monotone edge constraint but
/// differs from the identity when the partial order allows it (largest-
/// first Kahn order). perm[old_id] = new_id.
std::vector<int> alternative_node_order(const LabelGraph& g);

LabelGraph relabel(const LabelGraph& g, const std::vector<int>& perm);

}  // namespace gtce::testing

#endif  // GTCE_TESTS_TEST_SUPPORT_HPP_
