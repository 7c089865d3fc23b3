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

#ifndef GTCE_ALIGN_HPP_
#define GTCE_ALIGN_HPP_

#include <span>
#include <vector>

#include "gtce/graph.hpp"
#include "gtce/loss.hpp"

namespace gtce {

/// First frame of a token in an alignment path.
struct TokenOnset {
  int frame = 0;
  int token = 0;

  bool operator==(const TokenOnset&) const = default;
};

/// Best single path through the supervision graph: per-frame node ids
/// (length T), the derived non-blank token onsets, and the path's log
/// probability.
struct FrameAlignment {
  std::vector<int> node_path;
  std::vector<TokenOnset> onsets;
  double log_prob = 0.0;
};

/// Max-product counterpart of the forward sweep, with backtrace. Throws
/// NumericError when no path has positive probability. A token onset is
/// the first frame the path occupies a non-blank node.
FrameAlignment viterbi_align(const LabelGraph& g, const PosteriorSequence& p,
                             int blank_label = kBlankLabel);

/// Tags a list of onsets with a speaker index.
std::vector<AlignmentEvent> to_events(std::span<const TokenOnset> onsets,
                                      int speaker);

/// Merges per-speaker onset lists into one list sorted by frame; equal
/// frames are ordered by descending speaker energy (then speaker index).
/// Each inner list must be frame-sorted and carry its own index as
/// speaker.
std::vector<AlignmentEvent> merge_alignments(
    const std::vector<std::vector<AlignmentEvent>>& per_speaker,
    std::span<const double> energies);

/// Fraction of token onsets that share a frame with an onset of another
/// speaker. Needs at least two speakers; 0 when there are no onsets.
double concurrency_rate(
    const std::vector<std::vector<AlignmentEvent>>& per_speaker);

}  // namespace gtce

#endif  // GTCE_ALIGN_HPP_
