// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#include "graphkd/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace graphkd {

std::vector<Vec> grad_node_loss(const std::vector<Vec>& teacher_nodes,
                                const std::vector<Vec>& student_nodes) {
  if (teacher_nodes.size() != student_nodes.size()) {
    throw std::invalid_argument("grad_node_loss: teacher and student node counts differ");
  }
  std::vector<Vec> grads(student_nodes.size());
  if (student_nodes.empty()) return grads;
  const double scale = 2.0 / static_cast<double>(student_nodes.size());
  for (std::size_t i = 0; i < student_nodes.size(); ++i) {
    const Vec& t = teacher_nodes[i];
    const Vec& s = student_nodes[i];
    if (t.size() != s.size()) throw std::invalid_argument("grad_node_loss: node dims differ");
    Vec g(s.size());
    for (std::size_t d = 0; d < s.size(); ++d) g[d] = scale * (s[d] - t[d]);
    grads[i] = std::move(g);
  }
  return grads;
}

std::vector<Vec> grad_edge_loss(const std::vector<Vec>& student_nodes, const EdgeMatrix& e_t,
                                double eps) {
  return grad_edge_loss(student_nodes, e_t, {}, /*fg_linked_only=*/false, eps);
}

std::vector<Vec> grad_edge_loss(const std::vector<Vec>& student_nodes, const EdgeMatrix& e_t,
                                const std::vector<bool>& is_fg_participant, bool fg_linked_only,
                                double eps) {
  const std::size_t n = student_nodes.size();
  if (e_t.size() != n) {
    throw std::invalid_argument("grad_edge_loss: node count does not match teacher matrix");
  }
  std::vector<Vec> grads(n);
  if (n == 0) return grads;
  const std::size_t dim = student_nodes[0].size();
  std::vector<double> norms(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (student_nodes[p].size() != dim) {
      throw std::invalid_argument("grad_edge_loss: inconsistent node dims");
    }
    norms[p] = std::sqrt(squared_norm(student_nodes[p]));
    grads[p] = Vec(dim, 0.0);
  }
  // L = (1/N^2) sum_pq m_pq (e^t_pq - e^s_pq)^2 with e^s_pq = cos(v_p, v_q).
  // Entries (p,q) and (q,p) carry the same value, so each unordered pair
  // feeds v_p twice: dL/dv_p = (4/N^2) sum_{q != p} m_pq (e^s - e^t) dcos/dv_p,
  // dcos(v_p,v_q)/dv_p = v_q/(|v_p||v_q|) - cos * v_p/|v_p|^2.
  const double scale = 4.0 / (static_cast<double>(n) * static_cast<double>(n));
  for (std::size_t p = 0; p < n; ++p) {
    if (norms[p] < eps) continue;  // below-eps node: its edges are held at 0
    const Vec& vp = student_nodes[p];
    for (std::size_t q = 0; q < n; ++q) {
      if (q == p || norms[q] < eps) continue;
      if (fg_linked_only && !is_fg_participant[p] && !is_fg_participant[q]) continue;
      const Vec& vq = student_nodes[q];
      const double cos_pq = dot(vp, vq) / (norms[p] * norms[q]);
      const double coeff = scale * (cos_pq - e_t.values(p, q));
      const double inv_pq = 1.0 / (norms[p] * norms[q]);
      const double radial = cos_pq / (norms[p] * norms[p]);
      for (std::size_t d = 0; d < dim; ++d) {
        grads[p][d] += coeff * (vq[d] * inv_pq - radial * vp[d]);
      }
    }
  }
  return grads;
}

std::vector<Vec> grad_kld_cls(const std::vector<Vec>& teacher_logits,
                              const std::vector<Vec>& student_logits, double temperature) {
  if (teacher_logits.size() != student_logits.size()) {
    throw std::invalid_argument("grad_kld_cls: instance counts differ");
  }
  if (temperature <= 0.0) throw std::invalid_argument("grad_kld_cls: temperature must be positive");
  std::vector<Vec> grads(student_logits.size());
  if (student_logits.empty()) return grads;
  const double scale = temperature / static_cast<double>(student_logits.size());
  for (std::size_t i = 0; i < student_logits.size(); ++i) {
    if (teacher_logits[i].size() != student_logits[i].size()) {
      throw std::invalid_argument("grad_kld_cls: logit dims differ");
    }
    const Vec p = softmax(teacher_logits[i], temperature);
    const Vec q = softmax(student_logits[i], temperature);
    Vec g(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) g[j] = scale * (q[j] - p[j]);
    grads[i] = std::move(g);
  }
  return grads;
}

std::vector<Vec> grad_reg_match(const std::vector<Vec>& teacher_reg,
                                const std::vector<Vec>& student_reg) {
  if (teacher_reg.size() != student_reg.size()) {
    throw std::invalid_argument("grad_reg_match: instance counts differ");
  }
  std::vector<Vec> grads(student_reg.size());
  if (student_reg.empty()) return grads;
  const double scale = 2.0 / static_cast<double>(student_reg.size());
  for (std::size_t i = 0; i < student_reg.size(); ++i) {
    const Vec& t = teacher_reg[i];
    const Vec& s = student_reg[i];
    if (t.size() != s.size()) throw std::invalid_argument("grad_reg_match: dims differ");
    Vec g(s.size());
    for (std::size_t d = 0; d < s.size(); ++d) g[d] = scale * (s[d] - t[d]);
    grads[i] = std::move(g);
  }
  return grads;
}

GradBundle grad_total(const Graph& g_t, const Graph& g_s, const std::vector<Vec>& teacher_logits,
                      const std::vector<Vec>& student_logits, const std::vector<Vec>& teacher_reg,
                      const std::vector<Vec>& student_reg, const LossWeights& w,
                      const DistillFlags& flags, double eps) {
  if (g_t.nodes.fg_ids != g_s.nodes.fg_ids || g_t.nodes.bg_ids != g_s.nodes.bg_ids ||
      g_t.edges.node_ids != g_s.edges.node_ids) {
    throw std::invalid_argument("grad_total: graphs were not built from the same records");
  }
  const std::size_t n_fg = g_s.nodes.fg_count();
  const std::size_t n_bg = g_s.nodes.bg_count();
  const double l2 = lambda2(w.alpha, n_fg, n_bg);

  GradBundle out;
  out.node_ids.reserve(n_fg + n_bg);
  out.node_ids.insert(out.node_ids.end(), g_s.nodes.fg_ids.begin(), g_s.nodes.fg_ids.end());
  out.node_ids.insert(out.node_ids.end(), g_s.nodes.bg_ids.begin(), g_s.nodes.bg_ids.end());
  out.d_nodes.resize(n_fg + n_bg);
  for (std::size_t i = 0; i < n_fg; ++i) out.d_nodes[i] = Vec(g_s.nodes.fg_nodes[i].size(), 0.0);
  for (std::size_t i = 0; i < n_bg; ++i) {
    out.d_nodes[n_fg + i] = Vec(g_s.nodes.bg_nodes[i].size(), 0.0);
  }

  if (flags.fg_node && n_fg > 0) {
    const auto g = grad_node_loss(g_t.nodes.fg_nodes, g_s.nodes.fg_nodes);
    for (std::size_t i = 0; i < n_fg; ++i) axpy(w.lambda1, g[i], out.d_nodes[i]);
  }
  if (flags.bg_node && n_bg > 0) {
    const auto g = grad_node_loss(g_t.nodes.bg_nodes, g_s.nodes.bg_nodes);
    for (std::size_t i = 0; i < n_bg; ++i) axpy(l2, g[i], out.d_nodes[n_fg + i]);
  }
  if (flags.edge && g_s.edges.size() > 0) {
    // Rebuild the participant node list in edge order: the foreground prefix,
    // then mined background nodes located by id.
    const std::size_t k = g_s.edges.size();
    std::vector<Vec> participants(k);
    std::vector<std::size_t> slot(k);  // participant -> index into d_nodes
    std::vector<bool> is_fg(k, false);
    std::unordered_set<int> fg_ids(g_s.nodes.fg_ids.begin(), g_s.nodes.fg_ids.end());
    for (std::size_t p = 0; p < k; ++p) {
      const int id = g_s.edges.node_ids[p];
      if (fg_ids.count(id) > 0) {
        const auto it = std::find(g_s.nodes.fg_ids.begin(), g_s.nodes.fg_ids.end(), id);
        const std::size_t i = static_cast<std::size_t>(it - g_s.nodes.fg_ids.begin());
        participants[p] = g_s.nodes.fg_nodes[i];
        slot[p] = i;
        is_fg[p] = true;
      } else {
        const auto it = std::find(g_s.nodes.bg_ids.begin(), g_s.nodes.bg_ids.end(), id);
        if (it == g_s.nodes.bg_ids.end()) {
          throw std::invalid_argument("grad_total: edge participant id " + std::to_string(id) +
                                      " not found among nodes");
        }
        const std::size_t i = static_cast<std::size_t>(it - g_s.nodes.bg_ids.begin());
        participants[p] = g_s.nodes.bg_nodes[i];
        slot[p] = n_fg + i;
      }
    }
    const auto g = grad_edge_loss(participants, g_t.edges, is_fg, w.fg_linked_only, eps);
    for (std::size_t p = 0; p < k; ++p) axpy(w.lambda3, g[p], out.d_nodes[slot[p]]);
  }

  if (flags.logits) {
    out.d_logits = grad_kld_cls(teacher_logits, student_logits, w.temperature);
    out.d_reg = grad_reg_match(teacher_reg, student_reg);
    for (auto& g : out.d_reg) {
      for (double& v : g) v *= w.reg_match_weight;
    }
  } else {
    out.d_logits.resize(student_logits.size());
    for (std::size_t i = 0; i < student_logits.size(); ++i) {
      out.d_logits[i] = Vec(student_logits[i].size(), 0.0);
    }
    out.d_reg.resize(student_reg.size());
    for (std::size_t i = 0; i < student_reg.size(); ++i) {
      out.d_reg[i] = Vec(student_reg[i].size(), 0.0);
    }
  }
  return out;
}

Vec flatten_outputs(const StudentOutputs& o) {
  Vec flat;
  std::size_t total = 0;
  for (const Vec& v : o.embeddings) total += v.size();
  for (const Vec& v : o.cls_logits) total += v.size();
  for (const Vec& v : o.reg_outputs) total += v.size();
  flat.reserve(total);
  for (const Vec& v : o.embeddings) flat.insert(flat.end(), v.begin(), v.end());
  for (const Vec& v : o.cls_logits) flat.insert(flat.end(), v.begin(), v.end());
  for (const Vec& v : o.reg_outputs) flat.insert(flat.end(), v.begin(), v.end());
  return flat;
}

StudentOutputs unflatten_outputs(std::span<const double> flat, const StudentOutputs& shape) {
  StudentOutputs out = shape;
  std::size_t pos = 0;
  auto take = [&flat, &pos](std::vector<Vec>& dst) {
    for (Vec& v : dst) {
      for (double& x : v) {
        if (pos >= flat.size()) {
          throw std::invalid_argument("unflatten_outputs: flat vector too short");
        }
        x = flat[pos++];
      }
    }
  };
  take(out.embeddings);
  take(out.cls_logits);
  take(out.reg_outputs);
  if (pos != flat.size()) {
    throw std::invalid_argument("unflatten_outputs: flat vector longer than the shape");
  }
  return out;
}

Vec flatten_grad_bundle(const GradBundle& bundle, const std::vector<int>& record_ids) {
  std::vector<Vec> by_record(record_ids.size());
  for (std::size_t j = 0; j < bundle.node_ids.size(); ++j) {
    const int id = bundle.node_ids[j];
    std::size_t pos = record_ids.size();
    for (std::size_t i = 0; i < record_ids.size(); ++i) {
      if (record_ids[i] == id) {
        pos = i;
        break;
      }
    }
    if (pos == record_ids.size()) {
      throw std::invalid_argument("flatten_grad_bundle: node id " + std::to_string(id) +
                                  " not present in record_ids");
    }
    by_record[pos] = bundle.d_nodes[j];
  }
  StudentOutputs as_outputs{std::move(by_record), bundle.d_logits, bundle.d_reg};
  return flatten_outputs(as_outputs);
}

GradCheckReport finite_diff_check(const LossFn& loss_fn, const Vec& point,
                                  const Vec& analytic_grad, double step, double tolerance) {
  if (point.size() != analytic_grad.size()) {
    throw std::invalid_argument("finite_diff_check: gradient length does not match point");
  }
  if (step <= 0.0) throw std::invalid_argument("finite_diff_check: step must be positive");

  GradCheckReport report;
  report.step_size = step;
  report.tolerance = tolerance;
  report.per_coordinate_errors.resize(point.size());
  report.passed = true;

  Vec x = point;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double f_plus = loss_fn(std::span<const double>(x));
    x[i] = saved - step;
    const double f_minus = loss_fn(std::span<const double>(x));
    x[i] = saved;

    double rel;
    double fd = 0.0;
    if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
      rel = std::numeric_limits<double>::infinity();
    } else {
      fd = (f_plus - f_minus) / (2.0 * step);
      const double a = analytic_grad[i];
      rel = std::abs(a - fd) / std::max(1e-12, std::abs(a) + std::abs(fd));
    }
    report.per_coordinate_errors[i] = rel;
    if (rel > report.max_rel_error || report.worst_coordinate < 0) {
      report.max_rel_error = rel;
      report.worst_coordinate = static_cast<long>(i);
      report.worst_analytic = analytic_grad[i];
      report.worst_numeric = fd;
    }
  }
  report.passed = report.max_rel_error < tolerance;
  return report;
}

}  // namespace graphkd
