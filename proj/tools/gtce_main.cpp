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

// Command line surface. Exit codes: 0 success, 1 failed check (gradcheck),
// 2 input/validation error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gtce/align.hpp"
#include "gtce/decode.hpp"
#include "gtce/error.hpp"
#include "gtce/graph.hpp"
#include "gtce/loss.hpp"
#include "gtce/tensor.hpp"
#include "gtce/trainer.hpp"

namespace {

using namespace gtce;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write file: " + path);
  f << content;
}

std::vector<int> parse_labels(const std::string& text) {
  std::istringstream in(text);
  std::vector<int> labels;
  int v;
  while (in >> v) labels.push_back(v);
  if (!in.eof()) throw InputError("labels file: expected whitespace-separated "
                                  "integer token indices");
  return labels;
}

// Onset list file: one "frame token speaker" triple per line.
std::vector<std::vector<AlignmentEvent>> parse_onsets(const std::string& text,
                                                      int num_speakers) {
  std::vector<std::vector<AlignmentEvent>> events(num_speakers);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream row(line);
    AlignmentEvent e;
    if (!(row >> e.frame >> e.token >> e.speaker)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw InputError("onsets file line " + std::to_string(lineno) +
                       ": expected 'frame token speaker'");
    }
    if (e.speaker < 0 || e.speaker >= num_speakers) {
      throw InputError("onsets file line " + std::to_string(lineno) +
                       ": speaker " + std::to_string(e.speaker) +
                       " out of range for " + std::to_string(num_speakers) +
                       " energies");
    }
    events[e.speaker].push_back(e);
  }
  return events;
}

PosteriorSequence load_posteriors(const std::string& label_path,
                                  const std::string& trans_path) {
  PosteriorSequence p{load_tensor(label_path), load_tensor(trans_path)};
  check_posteriors(p);
  return p;
}

std::uint64_t seed_or_env(const CLI::Option* opt, std::uint64_t value) {
  if (opt->count() > 0) return value;
  if (const char* env = std::getenv("GTCE_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return value;
}

// ---------------------------------------------------------------------------

struct BuildGraphArgs {
  std::string labels_file, onsets_file, out;
  std::vector<double> energies;
  int num_labels = 0;
  int transition_class = 0;
  int num_transitions = 0;
};

int cmd_build_graph(const BuildGraphArgs& a) {
  LabelGraph g;
  if (!a.labels_file.empty()) {
    const std::vector<int> labels = parse_labels(read_file(a.labels_file));
    g = build_ctc_graph(labels, a.num_labels, a.transition_class,
                        a.num_transitions);
  } else {
    if (a.energies.empty()) {
      throw InputError("--onsets-file requires --energies (one per speaker)");
    }
    const auto events = parse_onsets(read_file(a.onsets_file),
                                     static_cast<int>(a.energies.size()));
    g = build_multispeaker_graph(events, a.energies, a.num_labels);
  }
  const std::string doc = serialize_graph(g) + "\n";
  if (a.out.empty()) {
    std::cout << doc;
  } else {
    write_file(a.out, doc);
  }
  return 0;
}

struct LossArgs {
  std::string graph, label_tensor, trans_tensor, grad_label, grad_trans;
  bool logits = false;
};

int cmd_loss(const LossArgs& a) {
  const LabelGraph g = load_graph(a.graph);
  if (a.logits) {
    LogitSequence logits{load_tensor(a.label_tensor),
                         load_tensor(a.trans_tensor)};
    const GradOutput out = gradients(g, logits);
    std::cout << format_double(out.loss) << "\n";
    if (!a.grad_label.empty()) save_tensor(a.grad_label, out.dlabel);
    if (!a.grad_trans.empty()) save_tensor(a.grad_trans, out.dtrans);
  } else {
    if (!a.grad_label.empty() || !a.grad_trans.empty()) {
      throw InputError("gradient outputs need --logits inputs");
    }
    const PosteriorSequence p =
        load_posteriors(a.label_tensor, a.trans_tensor);
    std::cout << format_double(loss(g, p)) << "\n";
  }
  return 0;
}

struct GradcheckArgs {
  std::string graph, label_logits, trans_logits;
  double step = 1e-5;
  double tol = 1e-6;
  bool corrupt = false;  // test hook: break the analytic gradient
};

int cmd_gradcheck(const GradcheckArgs& a) {
  if (a.step > 1e-2) {
    std::cerr << "warning: step " << a.step
              << " is large; finite differences are unreliable at this size\n";
  }
  const LabelGraph g = load_graph(a.graph);
  LogitSequence logits{load_tensor(a.label_logits),
                       load_tensor(a.trans_logits)};
  GradOutput analytic = gradients(g, logits);
  if (a.corrupt) analytic.dlabel(0, 0) += 0.5;

  auto loss_of = [&](const LogitSequence& l) {
    return loss(g, softmax_rows(l));
  };
  auto check = [&](Matrix& m, const Matrix& grad) {
    double worst = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        const double keep = m(r, c);
        m(r, c) = keep + a.step;
        const double up = loss_of(logits);
        m(r, c) = keep - a.step;
        const double down = loss_of(logits);
        m(r, c) = keep;
        const double fd = (up - down) / (2.0 * a.step);
        const double ana = grad(r, c);
        const double denom =
            std::max({1e-8, std::abs(fd), std::abs(ana)});
        worst = std::max(worst, std::abs(ana - fd) / denom);
      }
    }
    return worst;
  };

  const double label_err = check(logits.label_logits, analytic.dlabel);
  const double trans_err = check(logits.trans_logits, analytic.dtrans);
  const bool label_ok = label_err <= a.tol;
  const bool trans_ok = trans_err <= a.tol;
  std::cout << "label: " << (label_ok ? "PASS" : "FAIL")
            << " max_rel_err=" << format_double(label_err) << "\n";
  std::cout << "trans: " << (trans_ok ? "PASS" : "FAIL")
            << " max_rel_err=" << format_double(trans_err) << "\n";
  return (label_ok && trans_ok) ? 0 : 1;
}

struct DecodeArgs {
  std::string label_tensor, trans_tensor, lm_file, vocab_file;
  int speakers = 0;
  int beam = 40;
  double lm_weight = 1.0;
};

int cmd_decode(const DecodeArgs& a) {
  const PosteriorSequence p = load_posteriors(a.label_tensor, a.trans_tensor);
  std::optional<BigramLanguageModel> lm;
  if (!a.lm_file.empty()) lm.emplace(load_tensor(a.lm_file));

  const auto results = prefix_beam_search(
      p, a.speakers, a.beam, lm ? &*lm : nullptr, a.lm_weight);
  const DecodeResult& top = results.front();

  nlohmann::ordered_json j;
  j["merged"] = nlohmann::ordered_json::array();
  for (const PrefixItem& item : top.merged) {
    j["merged"].push_back({item.token, item.speaker});
  }
  j["per_speaker"] = top.per_speaker;
  j["log_score"] = top.log_score;

  if (!a.vocab_file.empty()) {
    std::vector<std::string> vocab;
    std::istringstream in(read_file(a.vocab_file));
    std::string line;
    while (std::getline(in, line)) vocab.push_back(line);
    auto text_of = [&](const std::vector<int>& tokens) {
      std::string text;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        const int tok = tokens[i];
        if (tok < 0 || tok >= static_cast<int>(vocab.size())) {
          throw InputError("vocab file too small for token " +
                           std::to_string(tok));
        }
        if (i) text += ' ';
        text += vocab[tok];
      }
      return text;
    };
    j["per_speaker_text"] = nlohmann::ordered_json::array();
    for (const auto& tokens : top.per_speaker) {
      j["per_speaker_text"].push_back(text_of(tokens));
    }
  }
  std::cout << j.dump() << "\n";
  return 0;
}

struct TrainDemoArgs {
  std::uint64_t seed = 0;
  int epochs = 200;
  double lr = 0.1;
  double overlap = 0.0;
  int speakers = 2;
  int vocab = 5;
  int frames = 24;
  int utterances = 6;
  int tokens = 3;
  double noise = 0.05;
  std::string out_csv, checkpoint;
};

Matrix pack_with_bias(const Matrix& w, const std::vector<double>& b) {
  Matrix out(w.rows() + 1, w.cols());
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t c = 0; c < w.cols(); ++c) out(r, c) = w(r, c);
  }
  for (std::size_t c = 0; c < w.cols(); ++c) out(w.rows(), c) = b[c];
  return out;
}

int cmd_train_demo(const TrainDemoArgs& a) {
  std::vector<SyntheticUtterance> data;
  for (int u = 0; u < a.utterances; ++u) {
    SyntheticConfig cfg;
    cfg.seed = a.seed * 1000003ULL + static_cast<std::uint64_t>(u);
    cfg.num_speakers = a.speakers;
    cfg.vocab = a.vocab;
    cfg.frames = a.frames;
    cfg.overlap_ratio = a.overlap;
    cfg.tokens_per_speaker = a.tokens;
    cfg.noise = a.noise;
    data.push_back(generate_synthetic(cfg));
  }
  const int feature_dim = a.vocab + a.speakers + 1;
  ToyModel model = ToyModel::init(feature_dim, a.vocab, a.speakers + 1,
                                  a.seed ^ 0x9e3779b97f4a7c15ULL);
  const TrainResult res = train(std::move(model), data, a.epochs, a.lr);

  std::string csv = "epoch,mean_loss,token_accuracy\n";
  for (const EpochStats& row : res.log) {
    csv += std::to_string(row.epoch) + "," + format_double(row.mean_loss) +
           "," + format_double(row.token_accuracy) + "\n";
  }
  if (a.out_csv.empty()) {
    std::cout << csv;
  } else {
    write_file(a.out_csv, csv);
  }
  if (!a.checkpoint.empty()) {
    save_tensor(a.checkpoint + ".label.tsr",
                pack_with_bias(res.model.label_weights, res.model.label_bias));
    save_tensor(a.checkpoint + ".trans.tsr",
                pack_with_bias(res.model.trans_weights, res.model.trans_bias));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph temporal classification with trainable transitions"};
  app.require_subcommand(1);

  BuildGraphArgs bg;
  auto* build = app.add_subcommand(
      "build-graph", "Build a supervision graph (CTC or multi-speaker)");
  auto* labels_opt =
      build->add_option("--labels-file", bg.labels_file,
                        "token index sequence (CTC topology)");
  auto* onsets_opt = build->add_option(
      "--onsets-file", bg.onsets_file,
      "'frame token speaker' lines (multi-speaker topology)");
  labels_opt->excludes(onsets_opt);
  build->add_option("--energies", bg.energies,
                    "per-speaker energies, comma separated")
      ->delimiter(',');
  build->add_option("--num-labels", bg.num_labels, "alphabet size incl. blank")
      ->required();
  build->add_option("--transition-class", bg.transition_class,
                    "edge class for CTC mode");
  build->add_option("--num-transitions", bg.num_transitions,
                    "class count for CTC mode (default: class+1)");
  build->add_option("--out", bg.out, "output graph file (default: stdout)");

  LossArgs la;
  auto* lossc = app.add_subcommand("loss", "Evaluate the loss on one utterance");
  lossc->add_option("--graph", la.graph)->required();
  lossc->add_option("--label-tensor", la.label_tensor)->required();
  lossc->add_option("--trans-tensor", la.trans_tensor)->required();
  lossc->add_flag("--logits", la.logits,
                  "inputs are pre-softmax logits; enables gradients");
  lossc->add_option("--grad-label", la.grad_label,
                    "write label-logit gradients here");
  lossc->add_option("--grad-trans", la.grad_trans,
                    "write transition-logit gradients here");

  GradcheckArgs gc;
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "Compare analytic gradients with finite differences");
  gradcheck->add_option("--graph", gc.graph)->required();
  gradcheck->add_option("--label-logits", gc.label_logits)->required();
  gradcheck->add_option("--trans-logits", gc.trans_logits)->required();
  gradcheck->add_option("--step", gc.step, "central-difference step");
  gradcheck->add_option("--tol", gc.tol, "max relative error");
  gradcheck->add_flag("--corrupt-analytic", gc.corrupt)->group("");  // hidden

  DecodeArgs da;
  auto* decode = app.add_subcommand(
      "decode", "Prefix beam search over label/transition posteriors");
  decode->add_option("--label-tensor", da.label_tensor)->required();
  decode->add_option("--trans-tensor", da.trans_tensor)->required();
  decode->add_option("--speakers", da.speakers)->required();
  decode->add_option("--beam", da.beam, "beam width (default 40)");
  decode->add_option("--lm", da.lm_file,
                     "bigram LM table, (alphabet+1) x alphabet tensor");
  decode->add_option("--lm-weight", da.lm_weight);
  decode->add_option("--vocab", da.vocab_file,
                     "symbol per line; adds per_speaker_text");

  TrainDemoArgs td;
  auto* train_demo = app.add_subcommand(
      "train-demo", "Train the toy model on synthetic multi-speaker data");
  auto* seed_opt = train_demo->add_option(
      "--seed", td.seed, "RNG seed (falls back to GTCE_SEED, then 0)");
  train_demo->add_option("--epochs", td.epochs);
  train_demo->add_option("--lr", td.lr);
  train_demo->add_option("--overlap", td.overlap, "speaker overlap ratio 0..1");
  train_demo->add_option("--speakers", td.speakers);
  train_demo->add_option("--vocab", td.vocab);
  train_demo->add_option("--frames", td.frames);
  train_demo->add_option("--utterances", td.utterances);
  train_demo->add_option("--tokens", td.tokens, "tokens per speaker");
  train_demo->add_option("--noise", td.noise);
  train_demo->add_option("--out-csv", td.out_csv, "default: stdout");
  train_demo->add_option("--checkpoint", td.checkpoint,
                         "write <prefix>.label.tsr / <prefix>.trans.tsr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) {
      if (bg.labels_file.empty() == bg.onsets_file.empty()) {
        throw InputError("need exactly one of --labels-file / --onsets-file");
      }
      return cmd_build_graph(bg);
    }
    if (lossc->parsed()) return cmd_loss(la);
    if (gradcheck->parsed()) return cmd_gradcheck(gc);
    if (decode->parsed()) return cmd_decode(da);
    if (train_demo->parsed()) {
      td.seed = seed_or_env(seed_opt, td.seed);
      return cmd_train_demo(td);
    }
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
