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

#ifndef GTCE_LOSS_HPP_
#define GTCE_LOSS_HPP_

#include <cstddef>
#include <vector>

#include "gtce/graph.hpp"
#include "gtce/tensor.hpp"

// Loss over a supervision graph whose nodes carry labels and whose edges
// carry transition classes. A path of length T scores the product, per
// consumed edge, of the edge's static weight, the per-frame posterior of
// its transition class, and the per-frame posterior of the entered node's
// label; the loss is the negative log of the sum over all such paths.
//
// Boundary convention, fixed here and mirrored by brute_force_loss: edges
// out of the start node contribute weight, class posterior and label
// posterior of frame 1; edges into the non-emitting end node contribute
// their static weight only. All lattice work is log-domain double.

namespace gtce {

/// Per-frame posteriors: label_post is T x num_labels, trans_post is
/// T x num_transitions. Rows sum to 1 and entries are strictly positive.
struct PosteriorSequence {
  Matrix label_post;
  Matrix trans_post;

  std::size_t frames() const { return label_post.rows(); }
};

/// Unnormalized network outputs before the softmax, same shapes.
struct LogitSequence {
  Matrix label_logits;
  Matrix trans_logits;

  std::size_t frames() const { return label_logits.rows(); }
};

/// Log-domain lattices over (time 0..T, node 0..G+1). Row t of log_alpha
/// holds the forward mass after t emitting steps; log_beta row t the
/// suffix mass from frame t on (row 0 is start-anchored).
struct ForwardBackwardTables {
  Matrix log_alpha;
  Matrix log_beta;
};

/// Loss value and gradients w.r.t. the unnormalized label and transition
/// logits. Rows of both gradient matrices sum to zero.
struct GradOutput {
  double loss = 0.0;
  Matrix dlabel;
  Matrix dtrans;
};

/// Row-wise stabilized softmax of both matrices. Output entries are
/// clamped below at 1e-300 so logs stay finite.
PosteriorSequence softmax_rows(const LogitSequence& logits);

/// Throws InputError unless rows are normalized within `tol` and entries
/// lie in (0, 1].
void check_posteriors(const PosteriorSequence& p, double tol = 1e-12);

/// Forward lattice. Throws InputError on dimension mismatch or an invalid
/// graph.
Matrix forward(const LabelGraph& g, const PosteriorSequence& p);

/// Backward lattice, the mirror sweep (includes the end-edge weight).
Matrix backward(const LabelGraph& g, const PosteriorSequence& p);

ForwardBackwardTables forward_backward(const LabelGraph& g,
                                       const PosteriorSequence& p);

/// Negative log probability of the graph. Throws NumericError when no
/// path has positive probability.
double loss(const LabelGraph& g, const PosteriorSequence& p);

/// Loss plus exact gradients w.r.t. the logits.
GradOutput gradients(const LabelGraph& g, const LogitSequence& logits);

/// Per-frame estimates of the total log probability, from the node-form
/// and edge-form lattice identities. All 2T values agree on consistent
/// tables; used as a self-test.
struct ConsistencyProfile {
  std::vector<double> log_node_form;  // index t-1, frames 1..T
  std::vector<double> log_edge_form;
};

ConsistencyProfile consistency_profile(const LabelGraph& g,
                                       const PosteriorSequence& p,
                                       const ForwardBackwardTables& tables);

/// Reference loss by explicit path enumeration (unfold_paths); the oracle
/// the lattice implementation is tested against. Same boundary convention
/// as loss(). Throws NumericError past `path_cap`.
double brute_force_loss(const LabelGraph& g, const PosteriorSequence& p,
                        std::size_t path_cap = 1000000);

}  // namespace gtce

#endif  // GTCE_LOSS_HPP_
