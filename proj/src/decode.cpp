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

#include "gtce/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "gtce/error.hpp"
#include "gtce/graph.hpp"
#include "gtce/kernels.hpp"

namespace gtce {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_decode_inputs(const PosteriorSequence& p, int num_speakers) {
  if (num_speakers < 1) throw InputError("decode: need >= 1 speaker");
  if (p.frames() == 0 || p.frames() != p.trans_post.rows()) {
    throw InputError("decode: label/transition posterior frames differ");
  }
  if (p.label_post.cols() < 1) {
    throw InputError("decode: empty label alphabet");
  }
  if (p.trans_post.cols() != static_cast<std::size_t>(num_speakers) + 1) {
    throw InputError("decode: transition posterior must have speakers+1 "
                     "columns (blank class last), got " +
                     std::to_string(p.trans_post.cols()));
  }
}

struct Hyp {
  double log_pb = kNegInf;
  double log_pnb = kNegInf;
  double lm_accum = 0.0;                 // weighted, already summed
  std::vector<std::uint64_t> lm_states;  // one per speaker

  double log_mass() const { return kern::log_add(log_pb, log_pnb); }
  double rank_score() const { return log_mass() + lm_accum; }
};

using Beam = std::map<Prefix, Hyp>;

}  // namespace

BigramLanguageModel::BigramLanguageModel(Matrix table) : table_(std::move(table)) {
  if (table_.rows() != table_.cols() + 1) {
    throw InputError("bigram LM table must be (alphabet+1) x alphabet");
  }
}

double BigramLanguageModel::score(std::uint64_t state, int token) const {
  if (state >= table_.rows() || token < 0 ||
      token >= static_cast<int>(table_.cols())) {
    throw InputError("bigram LM: state or token out of range");
  }
  return table_(state, token);
}

std::uint64_t BigramLanguageModel::advance(std::uint64_t, int token) const {
  return static_cast<std::uint64_t>(token) + 1;
}

std::vector<DecodeResult> prefix_beam_search(const PosteriorSequence& p,
                                             int num_speakers, int beam_width,
                                             const LanguageModel* lm,
                                             double lm_weight) {
  check_decode_inputs(p, num_speakers);
  if (beam_width < 1) throw InputError("decode: beam width must be >= 1");

  const UniformLanguageModel uniform;
  if (lm == nullptr) {
    lm = &uniform;
    lm_weight = 0.0;
  }

  const std::size_t T = p.frames();
  const int num_labels = static_cast<int>(p.label_post.cols());
  const int blank_class = num_speakers;

  Beam prev;  // pruned beam being expanded
  {
    Hyp init;
    init.log_pb = 0.0;  // empty prefix starts as "all blank" with mass 1
    init.lm_states.assign(num_speakers, lm->initial_state());
    prev.emplace(Prefix{}, std::move(init));
  }
  Beam prev_all = prev;  // full previous-frame table, for resurrection

  Beam next;
  for (std::size_t t = 0; t < T; ++t) {
    next.clear();
    const double log_y_blank = std::log(p.label_post(t, kBlankLabel));
    const double log_w_blank = std::log(p.trans_post(t, blank_class));

    // Entry creation: a prefix's LM fields depend only on the prefix, so
    // they are filled once, whichever path creates the entry first.
    auto carry_entry = [&](const Prefix& key, const Hyp& from) -> Hyp& {
      auto [it, fresh] = next.try_emplace(key);
      if (fresh) {
        it->second.lm_accum = from.lm_accum;
        it->second.lm_states = from.lm_states;
      }
      return it->second;
    };
    auto extend_entry = [&](const Prefix& key, const Hyp& parent, int token,
                            int speaker) -> Hyp& {
      auto [it, fresh] = next.try_emplace(key);
      if (fresh) {
        it->second.lm_states = parent.lm_states;
        it->second.lm_accum =
            parent.lm_accum +
            lm_weight * lm->score(parent.lm_states[speaker], token);
        it->second.lm_states[speaker] =
            lm->advance(parent.lm_states[speaker], token);
      }
      return it->second;
    };

    for (const auto& [prefix, hyp] : prev) {
      const double log_total = hyp.log_mass();

      // Blank keeps the prefix and moves all mass into the blank bucket.
      Hyp& same = carry_entry(prefix, hyp);
      same.log_pb = kern::log_add(same.log_pb,
                                  log_y_blank + log_w_blank + log_total);

      for (int c = 0; c < num_labels; ++c) {
        if (c == kBlankLabel) continue;
        const double log_y = std::log(p.label_post(t, c));
        for (int s = 0; s < num_speakers; ++s) {
          const double step = log_y + std::log(p.trans_post(t, s));
          Prefix extended = prefix;
          extended.push_back({c, s});

          if (!prefix.empty() && prefix.back() == PrefixItem{c, s}) {
            // Same item again: only the blank-separated mass starts a new
            // item; the rest merges into the unchanged prefix.
            Hyp& grown = extend_entry(extended, hyp, c, s);
            grown.log_pnb = kern::log_add(grown.log_pnb, hyp.log_pb + step);
            Hyp& merged = carry_entry(prefix, hyp);
            merged.log_pnb = kern::log_add(merged.log_pnb, hyp.log_pnb + step);
          } else {
            Hyp& grown = extend_entry(extended, hyp, c, s);
            grown.log_pnb = kern::log_add(grown.log_pnb, log_total + step);
          }

          // Resurrection: if the extended prefix is alive it will handle
          // its own continuations when its turn comes; if it fell out of
          // the beam, resume them from its previous-frame masses.
          if (!prev.contains(extended)) {
            auto old = prev_all.find(extended);
            if (old != prev_all.end()) {
              Hyp& grown = extend_entry(extended, hyp, c, s);
              grown.log_pb =
                  kern::log_add(grown.log_pb, log_y_blank + log_w_blank +
                                                  old->second.log_mass());
              grown.log_pnb =
                  kern::log_add(grown.log_pnb, step + old->second.log_pnb);
            }
          }
        }
      }
    }

    // Keep the beam_width most probable prefixes; ties break towards the
    // lexicographically smaller prefix (map order makes this stable).
    std::vector<const Beam::value_type*> ranked;
    ranked.reserve(next.size());
    for (const auto& kv : next) ranked.push_back(&kv);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto* a, const auto* b) {
                       return a->second.rank_score() > b->second.rank_score();
                     });
    if (ranked.size() > static_cast<std::size_t>(beam_width)) {
      ranked.resize(beam_width);
    }
    prev.clear();
    for (const auto* kv : ranked) prev.insert(*kv);
    prev_all = std::move(next);
    next = Beam{};
  }

  std::vector<DecodeResult> results;
  results.reserve(prev.size());
  std::vector<const Beam::value_type*> ranked;
  for (const auto& kv : prev) ranked.push_back(&kv);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto* a, const auto* b) {
                     return a->second.rank_score() > b->second.rank_score();
                   });
  for (const auto* kv : ranked) {
    DecodeResult r;
    r.merged = kv->first;
    r.per_speaker = split_by_speaker(kv->first, num_speakers);
    r.log_score = kv->second.rank_score();
    results.push_back(std::move(r));
  }
  return results;
}

DecodeResult greedy_decode(const PosteriorSequence& p, int num_speakers) {
  check_decode_inputs(p, num_speakers);
  const std::size_t T = p.frames();
  const int blank_class = num_speakers;

  DecodeResult out;
  double log_score = 0.0;
  PrefixItem prev{-1, -1};  // sentinel: previous frame emitted nothing
  for (std::size_t t = 0; t < T; ++t) {
    const auto label_row = p.label_post.row(t);
    const auto trans_row = p.trans_post.row(t);
    const int k = static_cast<int>(
        std::max_element(label_row.begin(), label_row.end()) -
        label_row.begin());
    const int i = static_cast<int>(
        std::max_element(trans_row.begin(), trans_row.end()) -
        trans_row.begin());
    log_score += std::log(label_row[k]) + std::log(trans_row[i]);

    if (k == kBlankLabel || i == blank_class) {
      prev = {-1, -1};  // acts like blank: breaks any repeat run
      continue;
    }
    const PrefixItem cur{k, i};
    if (cur != prev) out.merged.push_back(cur);
    prev = cur;
  }
  out.per_speaker = split_by_speaker(out.merged, num_speakers);
  out.log_score = log_score;
  return out;
}

std::vector<std::vector<int>> split_by_speaker(const Prefix& merged,
                                               int num_speakers) {
  if (num_speakers < 1) throw InputError("split_by_speaker: need >= 1 speaker");
  std::vector<std::vector<int>> out(num_speakers);
  for (const PrefixItem& item : merged) {
    if (item.speaker < 0 || item.speaker >= num_speakers) {
      throw InputError("split_by_speaker: speaker " +
                       std::to_string(item.speaker) + " out of range");
    }
    out[item.speaker].push_back(item.token);
  }
  return out;
}

}  // namespace gtce
