// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#include "graphkd/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace graphkd {

namespace {

void require_same_ids(const std::vector<int>& a, const std::vector<int>& b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string("graph_loss: teacher/student ") + what +
                                " ids differ; graphs must be built from the same records");
  }
}

double log_sum_exp(const Vec& z) {
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

// Sum of squared entry differences restricted to pairs with at least one
// foreground endpoint when fg_linked_only, divided by N^2. The denominator
// stays N^2 either way: masking zero-weights pairs, it does not shrink the
// normalization.
double edge_sq_discrepancy(const EdgeMatrix& e_t, const EdgeMatrix& e_s,
                           const std::vector<bool>& is_fg, bool fg_linked_only) {
  if (e_t.node_ids != e_s.node_ids) {
    throw std::invalid_argument("edge_loss: node id mismatch between matrices");
  }
  const std::size_t n = e_t.size();
  if (n == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (fg_linked_only && !is_fg[p] && !is_fg[q]) continue;
      const double d = e_t.values(p, q) - e_s.values(p, q);
      acc += d * d;
    }
  }
  return acc / (static_cast<double>(n) * static_cast<double>(n));
}

}  // namespace

double lambda2(double alpha, std::size_t n_fg, std::size_t n_bg) {
  if (n_bg == 0) return 0.0;
  return alpha * static_cast<double>(n_fg) / static_cast<double>(n_bg);
}

double node_loss(const std::vector<Vec>& teacher_nodes, const std::vector<Vec>& student_nodes) {
  if (teacher_nodes.size() != student_nodes.size()) {
    throw std::invalid_argument("node_loss: teacher and student node counts differ");
  }
  if (teacher_nodes.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < teacher_nodes.size(); ++i) {
    acc += squared_distance(teacher_nodes[i], student_nodes[i]);
  }
  return acc / static_cast<double>(teacher_nodes.size());
}

double edge_loss(const EdgeMatrix& e_t, const EdgeMatrix& e_s) {
  return edge_sq_discrepancy(e_t, e_s, {}, /*fg_linked_only=*/false);
}

double edge_distance(const EdgeMatrix& e_t, const EdgeMatrix& e_s) { return edge_loss(e_t, e_s); }

Vec softmax(const Vec& logits, double temperature) {
  if (temperature <= 0.0) throw std::invalid_argument("softmax: temperature must be positive");
  if (logits.empty()) throw std::invalid_argument("softmax: empty logits");
  Vec z(logits.size());
  for (std::size_t j = 0; j < logits.size(); ++j) z[j] = logits[j] / temperature;
  const double lse = log_sum_exp(z);
  for (double& v : z) v = std::exp(v - lse);
  return z;
}

double cross_entropy(const Vec& logits, int class_index) {
  if (class_index < 0 || static_cast<std::size_t>(class_index) >= logits.size()) {
    throw std::invalid_argument("cross_entropy: class index " + std::to_string(class_index) +
                                " out of range for " + std::to_string(logits.size()) + " logits");
  }
  return log_sum_exp(logits) - logits[static_cast<std::size_t>(class_index)];
}

double kld_cls_loss(const std::vector<Vec>& teacher_logits, const std::vector<Vec>& student_logits,
                    double temperature) {
  if (teacher_logits.size() != student_logits.size()) {
    throw std::invalid_argument("kld_cls_loss: instance counts differ");
  }
  if (temperature <= 0.0) throw std::invalid_argument("kld_cls_loss: temperature must be positive");
  if (teacher_logits.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < teacher_logits.size(); ++i) {
    const Vec& t = teacher_logits[i];
    const Vec& s = student_logits[i];
    if (t.size() != s.size()) throw std::invalid_argument("kld_cls_loss: logit dims differ");
    Vec zt(t.size()), zs(s.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
      zt[j] = t[j] / temperature;
      zs[j] = s[j] / temperature;
    }
    const double lse_t = log_sum_exp(zt);
    const double lse_s = log_sum_exp(zs);
    // sum_j p_j (log p_j - log q_j) with p the teacher distribution
    double kl = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double log_p = zt[j] - lse_t;
      const double log_q = zs[j] - lse_s;
      kl += std::exp(log_p) * (log_p - log_q);
    }
    acc += temperature * temperature * kl;
  }
  return acc / static_cast<double>(teacher_logits.size());
}

double reg_match_loss(const std::vector<Vec>& teacher_reg, const std::vector<Vec>& student_reg) {
  if (teacher_reg.size() != student_reg.size()) {
    throw std::invalid_argument("reg_match_loss: instance counts differ");
  }
  if (teacher_reg.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < teacher_reg.size(); ++i) {
    acc += squared_distance(teacher_reg[i], student_reg[i]);
  }
  return acc / static_cast<double>(teacher_reg.size());
}

LossBreakdown graph_loss(const Graph& g_t, const Graph& g_s, const LossWeights& w,
                         const DistillFlags& flags) {
  require_same_ids(g_t.nodes.fg_ids, g_s.nodes.fg_ids, "foreground");
  require_same_ids(g_t.nodes.bg_ids, g_s.nodes.bg_ids, "background");
  require_same_ids(g_t.edges.node_ids, g_s.edges.node_ids, "edge participant");

  LossBreakdown out;
  out.lambda2_used = lambda2(w.alpha, g_t.nodes.fg_count(), g_t.nodes.bg_count());
  if (flags.fg_node) out.node_fg = node_loss(g_t.nodes.fg_nodes, g_s.nodes.fg_nodes);
  if (flags.bg_node) out.node_bg = node_loss(g_t.nodes.bg_nodes, g_s.nodes.bg_nodes);
  if (flags.edge) {
    std::vector<bool> is_fg;
    if (w.fg_linked_only) {
      std::unordered_set<int> fg(g_t.nodes.fg_ids.begin(), g_t.nodes.fg_ids.end());
      is_fg.resize(g_t.edges.size());
      for (std::size_t p = 0; p < is_fg.size(); ++p) {
        is_fg[p] = fg.count(g_t.edges.node_ids[p]) > 0;
      }
    }
    out.edge = edge_sq_discrepancy(g_t.edges, g_s.edges, is_fg, w.fg_linked_only);
  }
  out.total_distill =
      w.lambda1 * out.node_fg + out.lambda2_used * out.node_bg + w.lambda3 * out.edge;
  return out;
}

LossBreakdown total_distill_loss(const Graph& g_t, const Graph& g_s,
                                 const std::vector<Vec>& teacher_logits,
                                 const std::vector<Vec>& student_logits,
                                 const std::vector<Vec>& teacher_reg,
                                 const std::vector<Vec>& student_reg, const LossWeights& w,
                                 const DistillFlags& flags) {
  LossBreakdown out = graph_loss(g_t, g_s, w, flags);
  if (flags.logits) {
    out.kld_cls = kld_cls_loss(teacher_logits, student_logits, w.temperature);
    out.reg_match = reg_match_loss(teacher_reg, student_reg);
  }
  out.total_distill += out.kld_cls + w.reg_match_weight * out.reg_match;
  return out;
}

}  // namespace graphkd
