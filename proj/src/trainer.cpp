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

#include "gtce/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gtce/align.hpp"
#include "gtce/error.hpp"
#include "gtce/kernels.hpp"

namespace gtce {

namespace {

// Deterministic across platforms: raw engine output only, no
// std::*_distribution.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive bounds
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

double gaussian(std::mt19937_64& rng) {
  // Box-Muller; one draw per call keeps the stream simple.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace

ToyModel ToyModel::init(int feature_dim, int num_labels, int num_transitions,
                        std::uint64_t seed) {
  if (feature_dim < 1 || num_labels < 2 || num_transitions < 1) {
    throw InputError("ToyModel::init: bad dimensions");
  }
  std::mt19937_64 rng(seed);
  ToyModel m;
  m.label_weights = Matrix(feature_dim, num_labels);
  m.trans_weights = Matrix(feature_dim, num_transitions);
  for (double& v : m.label_weights.flat()) v = 0.1 * gaussian(rng);
  for (double& v : m.trans_weights.flat()) v = 0.1 * gaussian(rng);
  m.label_bias.assign(num_labels, 0.0);
  m.trans_bias.assign(num_transitions, 0.0);
  return m;
}

LogitSequence ToyModel::predict(const Matrix& features) const {
  const std::size_t T = features.rows();
  const std::size_t D = features.cols();
  if (D != label_weights.rows() || D != trans_weights.rows()) {
    throw InputError("ToyModel::predict: feature dimension mismatch");
  }
  LogitSequence out;
  out.label_logits = Matrix(T, label_weights.cols());
  out.trans_logits = Matrix(T, trans_weights.cols());
  kern::matmul(features.data(), label_weights.data(), out.label_logits.data(),
               T, D, label_weights.cols());
  kern::matmul(features.data(), trans_weights.data(), out.trans_logits.data(),
               T, D, trans_weights.cols());
  for (std::size_t t = 0; t < T; ++t) {
    kern::axpy(1.0, {label_bias.data(), label_bias.size()},
               out.label_logits.row(t));
    kern::axpy(1.0, {trans_bias.data(), trans_bias.size()},
               out.trans_logits.row(t));
  }
  return out;
}

SyntheticUtterance generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.vocab < 2) throw InputError("generate_synthetic: vocab must be >= 2");
  if (cfg.num_speakers < 1) {
    throw InputError("generate_synthetic: need >= 1 speaker");
  }
  if (cfg.overlap_ratio < 0.0 || cfg.overlap_ratio > 1.0) {
    throw InputError("generate_synthetic: overlap ratio outside [0, 1]");
  }
  if (cfg.tokens_per_speaker < 1) {
    throw InputError("generate_synthetic: need >= 1 token per speaker");
  }

  const int S = cfg.num_speakers;
  const double r = cfg.overlap_ratio;
  // Each speaker is active over a window of length L; consecutive windows
  // are shifted by L*(1-r), so r=0 tiles them and r=1 stacks them.
  const int L = static_cast<int>(
      std::floor(cfg.frames / (1.0 + (S - 1) * (1.0 - r))));
  const int min_len = 2 * cfg.tokens_per_speaker;
  if (L < min_len) {
    throw InputError(
        "generate_synthetic: frames too small for requested tokens/overlap");
  }

  std::mt19937_64 rng(cfg.seed);
  SyntheticUtterance utt;
  utt.events.resize(S);
  utt.energies.resize(S);

  for (int s = 0; s < S; ++s) {
    utt.energies[s] = 0.5 + uniform01(rng);
    const int start = static_cast<int>(std::floor(s * L * (1.0 - r)));
    for (int j = 0; j < cfg.tokens_per_speaker; ++j) {
      const int frame = start + j * L / cfg.tokens_per_speaker;
      const int token = uniform_int(rng, 1, cfg.vocab - 1);
      utt.events[s].push_back({frame, token, s});
    }
  }

  utt.merged = merge_alignments(utt.events, utt.energies);
  // The shortest accepting path emits every token plus one blank between
  // indistinguishable neighbours; it must fit into the frame budget.
  int min_path = static_cast<int>(utt.merged.size());
  for (std::size_t j = 1; j < utt.merged.size(); ++j) {
    if (utt.merged[j].token == utt.merged[j - 1].token &&
        utt.merged[j].speaker == utt.merged[j - 1].speaker) {
      ++min_path;
    }
  }
  if (min_path > cfg.frames) {
    throw InputError("generate_synthetic: frames too small for the merged "
                     "token sequence");
  }
  utt.graph = build_multispeaker_graph(utt.events, utt.energies, cfg.vocab);
  utt.reference.resize(S);
  for (int s = 0; s < S; ++s) {
    for (const AlignmentEvent& e : utt.events[s]) {
      utt.reference[s].push_back(e.token);
    }
  }

  // Indicator features: label channels then class channels; silent frames
  // point at blank label and blank class.
  const int blank_class = S;
  const int D = cfg.vocab + S + 1;
  utt.features = Matrix(cfg.frames, D);
  std::vector<char> active(cfg.frames, 0);
  for (const AlignmentEvent& e : utt.merged) {
    if (e.frame < cfg.frames) {
      utt.features(e.frame, e.token) += 1.0;
      utt.features(e.frame, cfg.vocab + e.speaker) += 1.0;
      active[e.frame] = 1;
    }
  }
  for (int t = 0; t < cfg.frames; ++t) {
    if (!active[t]) {
      utt.features(t, kBlankLabel) += 1.0;
      utt.features(t, cfg.vocab + blank_class) += 1.0;
    }
  }
  for (double& v : utt.features.flat()) v += cfg.noise * gaussian(rng);
  return utt;
}

ModelGradient model_gradient(const ToyModel& model,
                             const std::vector<SyntheticUtterance>& data) {
  if (data.empty()) throw InputError("model_gradient: empty dataset");
  const int D = model.feature_dim();
  const std::size_t K = model.label_weights.cols();
  const std::size_t I = model.trans_weights.cols();

  ModelGradient g;
  g.dlabel = Matrix(D + 1, K);
  g.dtrans = Matrix(D + 1, I);

  for (const SyntheticUtterance& utt : data) {
    const LogitSequence logits = model.predict(utt.features);
    const GradOutput go = gradients(utt.graph, logits);
    g.mean_loss += go.loss;
    // Chain rule through the linear layer: dW = X^T dLogits, db = column
    // sums; the bias row of the packed matrix holds db.
    for (std::size_t t = 0; t < utt.features.rows(); ++t) {
      for (int d = 0; d < D; ++d) {
        kern::axpy(utt.features(t, d), go.dlabel.row(t), g.dlabel.row(d));
        kern::axpy(utt.features(t, d), go.dtrans.row(t), g.dtrans.row(d));
      }
      kern::axpy(1.0, go.dlabel.row(t), g.dlabel.row(D));
      kern::axpy(1.0, go.dtrans.row(t), g.dtrans.row(D));
    }
  }
  const double inv = 1.0 / static_cast<double>(data.size());
  kern::scale(g.dlabel.flat(), inv);
  kern::scale(g.dtrans.flat(), inv);
  g.mean_loss *= inv;
  return g;
}

namespace {

double merged_token_accuracy(const ToyModel& model,
                             const std::vector<SyntheticUtterance>& data) {
  std::size_t matched = 0, denom = 0;
  for (const SyntheticUtterance& utt : data) {
    const int S = utt.graph.num_transitions - 1;
    const PosteriorSequence p = softmax_rows(model.predict(utt.features));
    const DecodeResult hyp = greedy_decode(p, S);
    const std::size_t n =
        std::max(hyp.merged.size(), utt.merged.size());
    denom += n;
    for (std::size_t i = 0;
         i < std::min(hyp.merged.size(), utt.merged.size()); ++i) {
      if (hyp.merged[i].token == utt.merged[i].token &&
          hyp.merged[i].speaker == utt.merged[i].speaker) {
        ++matched;
      }
    }
  }
  return denom == 0 ? 1.0 : static_cast<double>(matched) / denom;
}

}  // namespace

TrainResult train(ToyModel model, const std::vector<SyntheticUtterance>& data,
                  int epochs, double learning_rate) {
  if (epochs < 1) throw InputError("train: epochs must be >= 1");
  const int D = model.feature_dim();

  TrainResult res;
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    const double accuracy = merged_token_accuracy(model, data);
    const ModelGradient g = model_gradient(model, data);
    if (!std::isfinite(g.mean_loss)) {
      throw NumericError("train: loss diverged at epoch " +
                         std::to_string(epoch));
    }
    res.log.push_back({epoch, g.mean_loss, accuracy});

    for (int d = 0; d < D; ++d) {
      kern::axpy(-learning_rate, g.dlabel.row(d), model.label_weights.row(d));
      kern::axpy(-learning_rate, g.dtrans.row(d), model.trans_weights.row(d));
    }
    kern::axpy(-learning_rate, g.dlabel.row(D),
               {model.label_bias.data(), model.label_bias.size()});
    kern::axpy(-learning_rate, g.dtrans.row(D),
               {model.trans_bias.data(), model.trans_bias.size()});
  }
  res.model = std::move(model);
  return res;
}

}  // namespace gtce
