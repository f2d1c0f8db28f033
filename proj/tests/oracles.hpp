// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deliberately naive reference implementations, written as direct scalar
// loops with no shared code paths into the library. Tests compare library
// results against these; keep them dumb and readable.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "graphkd/graph.hpp"
#include "graphkd/matrix.hpp"

namespace oracle {

using graphkd::InstanceRecord;
using graphkd::Vec;

inline double cosine(const Vec& a, const Vec& b, double eps = 1e-12) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  const double na = std::sqrt(aa);
  const double nb = std::sqrt(bb);
  if (na < eps || nb < eps) return 0.0;
  return ab / (na * nb);
}

inline std::vector<std::vector<double>> edge_matrix(const std::vector<Vec>& nodes,
                                                    double eps = 1e-12) {
  const std::size_t k = nodes.size();
  std::vector<std::vector<double>> e(k, std::vector<double>(k, 0.0));
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = 0; q < k; ++q) {
      e[p][q] = cosine(nodes[p], nodes[q], eps);
    }
  }
  return e;
}

// Mean squared euclidean distance between paired node lists.
inline double node_loss(const std::vector<Vec>& teacher, const std::vector<Vec>& student) {
  if (teacher.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < teacher.size(); ++i) {
    for (std::size_t k = 0; k < teacher[i].size(); ++k) {
      const double d = teacher[i][k] - student[i][k];
      total += d * d;
    }
  }
  return total / static_cast<double>(teacher.size());
}

inline double edge_loss(const std::vector<std::vector<double>>& et,
                        const std::vector<std::vector<double>>& es) {
  const std::size_t k = et.size();
  if (k == 0) return 0.0;
  double total = 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = 0; q < k; ++q) {
      const double d = et[p][q] - es[p][q];
      total += d * d;
    }
  }
  return total / static_cast<double>(k * k);
}

inline double lambda2(double alpha, std::size_t n_fg, std::size_t n_bg) {
  if (n_bg == 0) return 0.0;
  return alpha * static_cast<double>(n_fg) / static_cast<double>(n_bg);
}

inline std::vector<double> softmax(const Vec& logits, double temperature) {
  std::vector<double> p(logits.size());
  double mx = logits[0];
  for (double z : logits) mx = std::max(mx, z);
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp((logits[i] - mx) / temperature);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

inline double cross_entropy(const Vec& logits, int index) {
  const std::vector<double> p = softmax(logits, 1.0);
  return -std::log(p[static_cast<std::size_t>(index)]);
}

inline double kld(const std::vector<Vec>& teacher_logits, const std::vector<Vec>& student_logits,
                  double tau) {
  if (teacher_logits.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < teacher_logits.size(); ++i) {
    const std::vector<double> pt = softmax(teacher_logits[i], tau);
    const std::vector<double> ps = softmax(student_logits[i], tau);
    double kl = 0.0;
    for (std::size_t k = 0; k < pt.size(); ++k) {
      kl += pt[k] * (std::log(pt[k]) - std::log(ps[k]));
    }
    total += tau * tau * kl;
  }
  return total / static_cast<double>(teacher_logits.size());
}

inline double reg_match(const std::vector<Vec>& teacher_reg, const std::vector<Vec>& student_reg) {
  if (teacher_reg.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < teacher_reg.size(); ++i) {
    for (std::size_t k = 0; k < teacher_reg[i].size(); ++k) {
      const double d = teacher_reg[i][k] - student_reg[i][k];
      total += d * d;
    }
  }
  return total / static_cast<double>(teacher_reg.size());
}

inline std::vector<int> mined_ids(const std::vector<InstanceRecord>& records, double threshold) {
  std::vector<int> ids;
  for (const auto& r : records) {
    if (r.label == graphkd::kBackgroundLabel && r.teacher_cls_loss > threshold) {
      ids.push_back(r.id);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace oracle
