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

#ifndef GTCE_DECODE_HPP_
#define GTCE_DECODE_HPP_

#include <compare>
#include <cstdint>
#include <vector>

#include "gtce/loss.hpp"
#include "gtce/tensor.hpp"

// Time-synchronous prefix beam search over joint (token, speaker) items.
// The transition posterior must have S+1 columns: speakers 0..S-1 plus the
// blank class S. Blank frames score label-blank times class-blank; token
// frames score the token posterior times the speaker posterior.

namespace gtce {

/// One decoded item: a non-blank token uttered by a speaker.
struct PrefixItem {
  int token = 0;
  int speaker = 0;

  auto operator<=>(const PrefixItem&) const = default;
};

/// Decoded (token, speaker) sequence; empty means "nothing decoded yet".
using Prefix = std::vector<PrefixItem>;

/// Language model hook. Scoring is stateless given an explicit state, so
/// one instance can serve concurrent decodes; the decoder keeps one state
/// per speaker and scores each appended token against that speaker's own
/// history only.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual std::uint64_t initial_state() const = 0;
  /// Log probability of `token` given the history encoded by `state`.
  virtual double score(std::uint64_t state, int token) const = 0;
  virtual std::uint64_t advance(std::uint64_t state, int token) const = 0;
};

/// Scores 0 everywhere; the default when no LM is supplied.
class UniformLanguageModel final : public LanguageModel {
 public:
  std::uint64_t initial_state() const override { return 0; }
  double score(std::uint64_t, int) const override { return 0.0; }
  std::uint64_t advance(std::uint64_t state, int) const override {
    return state;
  }
};

/// Table bigram over the alphabet: row 0 scores tokens with empty
/// history, row 1+k after token k. Entries are log probabilities.
class BigramLanguageModel final : public LanguageModel {
 public:
  explicit BigramLanguageModel(Matrix table);
  std::uint64_t initial_state() const override { return 0; }
  double score(std::uint64_t state, int token) const override;
  std::uint64_t advance(std::uint64_t state, int token) const override;

 private:
  Matrix table_;
};

struct DecodeResult {
  Prefix merged;
  std::vector<std::vector<int>> per_speaker;  // speaker-filtered projections
  double log_score = 0.0;  // DP mass plus weighted LM score
};

/// Modified time-synchronous prefix beam search. Per frame, every live
/// prefix is extended by blank and by every (token, speaker) pair;
/// repeats merge per pair; prefixes that fell out of the beam but
/// reappear resume from their previous-frame masses. Prefixes are ranked
/// by combined blank/non-blank mass times the weighted LM score, ties
/// broken lexicographically. Returns up to `beam_width` results, best
/// first.
std::vector<DecodeResult> prefix_beam_search(const PosteriorSequence& p,
                                             int num_speakers, int beam_width,
                                             const LanguageModel* lm = nullptr,
                                             double lm_weight = 1.0);

/// Frame-wise argmax over both matrices, collapsed CTC-style at the
/// (token, speaker) level. A frame whose argmax label is blank or whose
/// argmax class is the blank class emits nothing and separates repeats.
/// log_score is the greedy path's log probability.
DecodeResult greedy_decode(const PosteriorSequence& p, int num_speakers);

/// Order-preserving per-speaker projection of a merged prefix.
std::vector<std::vector<int>> split_by_speaker(const Prefix& merged,
                                               int num_speakers);

}  // namespace gtce

#endif  // GTCE_DECODE_HPP_
