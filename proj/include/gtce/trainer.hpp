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

#ifndef GTCE_TRAINER_HPP_
#define GTCE_TRAINER_HPP_

#include <cstdint>
#include <vector>

#include "gtce/decode.hpp"
#include "gtce/graph.hpp"
#include "gtce/loss.hpp"
#include "gtce/tensor.hpp"

// End-to-end training demo: a linear-softmax predictor over synthetic
// features, trained by full-batch gradient descent on multi-speaker
// supervision graphs. Small on purpose; the loss is what is under test.

namespace gtce {

/// Linear predictor: one weight matrix plus bias per output head.
struct ToyModel {
  Matrix label_weights;  // feature_dim x num_labels
  std::vector<double> label_bias;
  Matrix trans_weights;  // feature_dim x num_transitions
  std::vector<double> trans_bias;

  static ToyModel init(int feature_dim, int num_labels, int num_transitions,
                       std::uint64_t seed);

  int feature_dim() const { return static_cast<int>(label_weights.rows()); }

  /// Per-frame logits for a T x feature_dim feature matrix.
  LogitSequence predict(const Matrix& features) const;
};

struct SyntheticConfig {
  std::uint64_t seed = 0;
  int num_speakers = 2;
  int vocab = 5;  // alphabet size including blank
  int frames = 24;
  double overlap_ratio = 0.0;  // 0 = disjoint speaker ranges, 1 = identical
  int tokens_per_speaker = 3;
  double noise = 0.05;  // stddev of the feature noise
};

/// One generated utterance with its supervision graph and references.
struct SyntheticUtterance {
  Matrix features;  // frames x (vocab + num_speakers + 1)
  LabelGraph graph;
  std::vector<std::vector<AlignmentEvent>> events;  // per speaker
  std::vector<double> energies;
  std::vector<AlignmentEvent> merged;       // chronological reference
  std::vector<std::vector<int>> reference;  // per-speaker token sequences
};

/// Deterministic in the seed. Features are noisy indicator vectors of the
/// active (token, speaker) per frame; silent frames indicate blank. Throws
/// InputError on infeasible parameter combinations.
SyntheticUtterance generate_synthetic(const SyntheticConfig& cfg);

struct EpochStats {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double token_accuracy = 0.0;  // merged (token, speaker) positional match
};

struct TrainResult {
  std::vector<EpochStats> log;
  ToyModel model;
};

/// Full-batch gradient descent. Per epoch the stats reflect the incoming
/// parameters (loss and greedy accuracy before that epoch's update).
/// Throws NumericError if the loss stops being finite.
TrainResult train(ToyModel model, const std::vector<SyntheticUtterance>& data,
                  int epochs, double learning_rate);

/// Mean-gradient of the full pipeline w.r.t. the model parameters, packed
/// as (weights-with-bias-row) matrices; the building block of train() and
/// of its finite-difference tests.
struct ModelGradient {
  Matrix dlabel;  // (feature_dim+1) x num_labels, last row = bias
  Matrix dtrans;
  double mean_loss = 0.0;
};

ModelGradient model_gradient(const ToyModel& model,
                             const std::vector<SyntheticUtterance>& data);

}  // namespace gtce

#endif  // GTCE_TRAINER_HPP_
