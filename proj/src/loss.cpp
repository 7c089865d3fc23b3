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

#include "gtce/loss.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "gtce/error.hpp"
#include "gtce/kernels.hpp"

namespace gtce {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_valid(const LabelGraph& g, const char* who) {
  ValidationReport rep = validate_graph(g);
  if (!rep.ok()) {
    std::string msg = std::string(who) + ": invalid graph:";
    for (const std::string& v : rep.violations) msg += "\n  " + v;
    throw InputError(msg);
  }
}

void check_dims(const LabelGraph& g, const PosteriorSequence& p,
                const char* who) {
  if (p.label_post.rows() == 0 || p.label_post.rows() != p.trans_post.rows()) {
    throw InputError(std::string(who) +
                     ": label/transition posterior frame counts differ");
  }
  if (p.label_post.cols() != static_cast<std::size_t>(g.num_labels)) {
    throw InputError(std::string(who) + ": label posterior has " +
                     std::to_string(p.label_post.cols()) +
                     " columns, graph expects " +
                     std::to_string(g.num_labels));
  }
  if (p.trans_post.cols() != static_cast<std::size_t>(g.num_transitions)) {
    throw InputError(std::string(who) + ": transition posterior has " +
                     std::to_string(p.trans_post.cols()) +
                     " columns, graph expects " +
                     std::to_string(g.num_transitions));
  }
}

struct InArc {
  int src;
  double log_weight;
  int cls;
};
struct OutArc {
  int dst;
  double log_weight;
  int cls;
};

// Per-node arc lists plus the end-edge column, shared by the sweeps.
struct Adjacency {
  std::vector<std::vector<InArc>> incoming;   // dst emitting only
  std::vector<std::vector<OutArc>> outgoing;  // src -> emitting dst
  std::vector<double> log_end_weight;         // -inf where no end edge

  explicit Adjacency(const LabelGraph& g)
      : incoming(g.num_nodes()),
        outgoing(g.num_nodes()),
        log_end_weight(g.num_nodes(), kNegInf) {
    const int end = g.end_node();
    for (const GraphEdge& e : g.edges) {
      if (e.dst == end) {
        log_end_weight[e.src] = std::log(e.weight);
      } else {
        incoming[e.dst].push_back({e.src, std::log(e.weight),
                                   e.transition_class});
        outgoing[e.src].push_back({e.dst, std::log(e.weight),
                                   e.transition_class});
      }
    }
  }
};

Matrix log_matrix(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows() * m.cols(); ++i) {
    out.data()[i] = std::log(m.data()[i]);
  }
  return out;
}

Matrix forward_impl(const LabelGraph& g, const PosteriorSequence& p,
                    const Adjacency& adj, const Matrix& log_y,
                    const Matrix& log_w) {
  const std::size_t T = p.frames();
  const int n = g.num_nodes();
  Matrix alpha(T + 1, n, kNegInf);
  alpha(0, 0) = 0.0;

  std::vector<double> buf;
  for (std::size_t t = 1; t <= T; ++t) {
    for (int v = 1; v < n - 1; ++v) {
      buf.clear();
      for (const InArc& a : adj.incoming[v]) {
        const double prev = alpha(t - 1, a.src);
        if (prev == kNegInf) continue;
        buf.push_back(prev + a.log_weight + log_w(t - 1, a.cls));
      }
      if (buf.empty()) continue;
      alpha(t, v) = kern::log_sum_exp(buf) + log_y(t - 1, g.nodes[v].label);
    }
  }
  return alpha;
}

Matrix backward_impl(const LabelGraph& g, const PosteriorSequence& p,
                     const Adjacency& adj, const Matrix& log_y,
                     const Matrix& log_w) {
  const std::size_t T = p.frames();
  const int n = g.num_nodes();
  Matrix beta(T + 1, n, kNegInf);

  for (int v = 1; v < n - 1; ++v) {
    if (adj.log_end_weight[v] == kNegInf) continue;
    beta(T, v) = log_y(T - 1, g.nodes[v].label) + adj.log_end_weight[v];
  }

  std::vector<double> buf;
  auto tail_mass = [&](std::size_t t, int v) {
    buf.clear();
    for (const OutArc& a : adj.outgoing[v]) {
      const double next = beta(t + 1, a.dst);
      if (next == kNegInf) continue;
      buf.push_back(a.log_weight + log_w(t, a.cls) + next);
    }
    return buf.empty() ? kNegInf : kern::log_sum_exp(buf);
  };

  for (std::size_t t = T - 1; t >= 1; --t) {
    for (int v = 1; v < n - 1; ++v) {
      const double tail = tail_mass(t, v);
      if (tail == kNegInf) continue;
      beta(t, v) = tail + log_y(t - 1, g.nodes[v].label);
    }
  }
  // Row 0 anchors the start node: its entry is the total log probability.
  beta(0, 0) = tail_mass(0, 0);
  return beta;
}

double total_log_prob(const LabelGraph& g, const Adjacency& adj,
                      const Matrix& alpha) {
  const std::size_t T = alpha.rows() - 1;
  std::vector<double> buf;
  for (int v = 1; v < g.num_nodes() - 1; ++v) {
    if (adj.log_end_weight[v] == kNegInf) continue;
    const double a = alpha(T, v);
    if (a == kNegInf) continue;
    buf.push_back(a + adj.log_end_weight[v]);
  }
  return kern::log_sum_exp(buf);
}

}  // namespace

PosteriorSequence softmax_rows(const LogitSequence& logits) {
  for (const Matrix* m : {&logits.label_logits, &logits.trans_logits}) {
    for (double v : m->flat()) {
      if (!std::isfinite(v)) {
        throw InputError("softmax_rows: logits must be finite");
      }
    }
  }
  PosteriorSequence p;
  p.label_post = Matrix(logits.label_logits.rows(), logits.label_logits.cols());
  p.trans_post = Matrix(logits.trans_logits.rows(), logits.trans_logits.cols());
  for (std::size_t t = 0; t < logits.label_logits.rows(); ++t) {
    kern::softmax_row(logits.label_logits.row(t), p.label_post.row(t));
  }
  for (std::size_t t = 0; t < logits.trans_logits.rows(); ++t) {
    kern::softmax_row(logits.trans_logits.row(t), p.trans_post.row(t));
  }
  return p;
}

void check_posteriors(const PosteriorSequence& p, double tol) {
  auto check = [tol](const Matrix& m, const char* name) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      double s = kern::sum(m.row(r));
      if (std::abs(s - 1.0) > tol) {
        throw InputError(std::string(name) + " row " + std::to_string(r) +
                         " does not sum to 1 (got " + format_double(s) + ")");
      }
      for (double v : m.row(r)) {
        if (!(v > 0.0) || v > 1.0) {
          throw InputError(std::string(name) + " row " + std::to_string(r) +
                           " has an entry outside (0, 1]");
        }
      }
    }
  };
  check(p.label_post, "label posterior");
  check(p.trans_post, "transition posterior");
}

Matrix forward(const LabelGraph& g, const PosteriorSequence& p) {
  require_valid(g, "forward");
  check_dims(g, p, "forward");
  Adjacency adj(g);
  return forward_impl(g, p, adj, log_matrix(p.label_post),
                      log_matrix(p.trans_post));
}

Matrix backward(const LabelGraph& g, const PosteriorSequence& p) {
  require_valid(g, "backward");
  check_dims(g, p, "backward");
  Adjacency adj(g);
  return backward_impl(g, p, adj, log_matrix(p.label_post),
                       log_matrix(p.trans_post));
}

ForwardBackwardTables forward_backward(const LabelGraph& g,
                                       const PosteriorSequence& p) {
  require_valid(g, "forward_backward");
  check_dims(g, p, "forward_backward");
  Adjacency adj(g);
  const Matrix log_y = log_matrix(p.label_post);
  const Matrix log_w = log_matrix(p.trans_post);
  return {forward_impl(g, p, adj, log_y, log_w),
          backward_impl(g, p, adj, log_y, log_w)};
}

double loss(const LabelGraph& g, const PosteriorSequence& p) {
  require_valid(g, "loss");
  check_dims(g, p, "loss");
  Adjacency adj(g);
  const Matrix alpha = forward_impl(g, p, adj, log_matrix(p.label_post),
                                    log_matrix(p.trans_post));
  const double log_p = total_log_prob(g, adj, alpha);
  if (log_p == kNegInf) {
    throw NumericError("loss: graph has zero probability under the posteriors");
  }
  return -log_p;
}

GradOutput gradients(const LabelGraph& g, const LogitSequence& logits) {
  require_valid(g, "gradients");
  const PosteriorSequence p = softmax_rows(logits);
  check_dims(g, p, "gradients");

  const std::size_t T = p.frames();
  const int n = g.num_nodes();
  Adjacency adj(g);
  const Matrix log_y = log_matrix(p.label_post);
  const Matrix log_w = log_matrix(p.trans_post);
  const Matrix alpha = forward_impl(g, p, adj, log_y, log_w);
  const Matrix beta = backward_impl(g, p, adj, log_y, log_w);

  const double log_p = total_log_prob(g, adj, alpha);
  if (log_p == kNegInf) {
    throw NumericError(
        "gradients: graph has zero probability under the posteriors");
  }

  GradOutput out;
  out.loss = -log_p;
  out.dlabel = Matrix(T, g.num_labels);
  out.dtrans = Matrix(T, g.num_transitions);

  // Label side: occupancy of label k at frame t is the node-form sum
  // restricted to nodes labelled k.
  std::vector<double> acc(std::max(g.num_labels, g.num_transitions));
  for (std::size_t t = 1; t <= T; ++t) {
    for (int k = 0; k < g.num_labels; ++k) acc[k] = kNegInf;
    for (int v = 1; v < n - 1; ++v) {
      const double a = alpha(t, v);
      const double b = beta(t, v);
      if (a == kNegInf || b == kNegInf) continue;
      const int k = g.nodes[v].label;
      acc[k] = kern::log_add(acc[k], a + b - log_y(t - 1, k));
    }
    for (int k = 0; k < g.num_labels; ++k) {
      const double y = p.label_post(t - 1, k);
      const double occ = (acc[k] == kNegInf) ? 0.0 : std::exp(acc[k] - log_p);
      out.dlabel(t - 1, k) = y - occ;
    }
  }

  // Transition side: per-class occupancy over the edges consumed at t,
  // without the class posterior itself (it multiplies back in below).
  for (std::size_t t = 1; t <= T; ++t) {
    for (int i = 0; i < g.num_transitions; ++i) acc[i] = kNegInf;
    for (int u = 0; u < n - 1; ++u) {
      const double a = alpha(t - 1, u);
      if (a == kNegInf) continue;
      for (const OutArc& arc : adj.outgoing[u]) {
        const double b = beta(t, arc.dst);
        if (b == kNegInf) continue;
        acc[arc.cls] = kern::log_add(acc[arc.cls], a + arc.log_weight + b);
      }
    }
    for (int i = 0; i < g.num_transitions; ++i) {
      const double w = p.trans_post(t - 1, i);
      const double occ =
          (acc[i] == kNegInf) ? 0.0
                              : std::exp(log_w(t - 1, i) + acc[i] - log_p);
      out.dtrans(t - 1, i) = w - occ;
    }
  }
  return out;
}

ConsistencyProfile consistency_profile(const LabelGraph& g,
                                       const PosteriorSequence& p,
                                       const ForwardBackwardTables& tables) {
  check_dims(g, p, "consistency_profile");
  const std::size_t T = p.frames();
  const int n = g.num_nodes();
  const Matrix log_y = log_matrix(p.label_post);
  const Matrix log_w = log_matrix(p.trans_post);
  Adjacency adj(g);

  ConsistencyProfile prof;
  prof.log_node_form.resize(T);
  prof.log_edge_form.resize(T);
  std::vector<double> buf;
  for (std::size_t t = 1; t <= T; ++t) {
    buf.clear();
    for (int v = 1; v < n - 1; ++v) {
      const double a = tables.log_alpha(t, v);
      const double b = tables.log_beta(t, v);
      if (a == kNegInf || b == kNegInf) continue;
      buf.push_back(a + b - log_y(t - 1, g.nodes[v].label));
    }
    prof.log_node_form[t - 1] = kern::log_sum_exp(buf);

    buf.clear();
    for (int u = 0; u < n - 1; ++u) {
      const double a = tables.log_alpha(t - 1, u);
      if (a == kNegInf) continue;
      for (const OutArc& arc : adj.outgoing[u]) {
        const double b = tables.log_beta(t, arc.dst);
        if (b == kNegInf) continue;
        buf.push_back(a + arc.log_weight + log_w(t - 1, arc.cls) + b);
      }
    }
    prof.log_edge_form[t - 1] = kern::log_sum_exp(buf);
  }
  return prof;
}

double brute_force_loss(const LabelGraph& g, const PosteriorSequence& p,
                        std::size_t path_cap) {
  require_valid(g, "brute_force_loss");
  check_dims(g, p, "brute_force_loss");
  const std::size_t T = p.frames();

  std::map<std::pair<int, int>, std::pair<double, int>> arc;  // (logw, cls)
  for (const GraphEdge& e : g.edges) {
    arc[{e.src, e.dst}] = {std::log(e.weight), e.transition_class};
  }
  const Matrix log_y = log_matrix(p.label_post);
  const Matrix log_w = log_matrix(p.trans_post);

  const auto paths = unfold_paths(g, static_cast<int>(T), path_cap);
  std::vector<double> scores;
  scores.reserve(paths.size());
  for (const auto& path : paths) {
    double lp = 0.0;
    for (std::size_t tau = 1; tau <= T; ++tau) {
      const auto& [logw, cls] = arc.at({path[tau - 1], path[tau]});
      lp += logw + log_w(tau - 1, cls) + log_y(tau - 1, g.nodes[path[tau]].label);
    }
    lp += arc.at({path[T], path[T + 1]}).first;  // end edge: weight only
    scores.push_back(lp);
  }
  const double log_p = kern::log_sum_exp(scores);
  if (log_p == kNegInf) {
    throw NumericError(
        "brute_force_loss: graph has zero probability under the posteriors");
  }
  return -log_p;
}

}  // namespace gtce
