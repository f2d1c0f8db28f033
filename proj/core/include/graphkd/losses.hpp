// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "graphkd/graph.hpp"
#include "graphkd/matrix.hpp"

namespace graphkd {

/// Weights of the distillation objective. lambda2 is never stored: it adapts
/// to the fg/bg ratio of each batch (see lambda2()).
struct LossWeights {
  double lambda1 = 0.5;          // foreground node term
  double lambda3 = 0.5;          // edge term
  double alpha = 1.0;            // scale of the adaptive background weight
  double temperature = 1.0;      // KLD softening, tau
  double reg_match_weight = 1.0; // regression-output matching term, 0 disables
  // Strict edge reading: only pairs touching a foreground node contribute to
  // the edge loss and its gradient. Off by default (all participant pairs).
  bool fg_linked_only = false;
};

/// Which distillation terms are active. Masked terms report 0 in the
/// breakdown and contribute nothing to gradients.
struct DistillFlags {
  bool edge = true;
  bool fg_node = true;
  bool bg_node = true;
  bool logits = true;  // covers both the classification KLD and reg matching
};

/// Per-term values of one evaluation of the distillation objective.
struct LossBreakdown {
  double node_fg = 0.0;
  double node_bg = 0.0;
  double edge = 0.0;
  double kld_cls = 0.0;
  double reg_match = 0.0;
  double lambda2_used = 0.0;
  double total_distill = 0.0;
};

/// Adaptive background weight alpha * n_fg / n_bg; 0 when there is no
/// background (the background term vanishes anyway).
double lambda2(double alpha, std::size_t n_fg, std::size_t n_bg);

/// Mean squared Euclidean distance between paired nodes: (1/N) sum ||t - s||^2.
/// 0 for empty lists. Pairing is positional; callers pair by shared id.
double node_loss(const std::vector<Vec>& teacher_nodes, const std::vector<Vec>& student_nodes);

/// Mean squared entrywise difference over all N^2 edge entries. Requires the
/// two matrices to cover the same node ids in the same order.
double edge_loss(const EdgeMatrix& e_t, const EdgeMatrix& e_s);

/// Relational-fidelity diagnostic: same formula as edge_loss, kept as its own
/// name because it is also reported as an evaluation metric, not only
/// optimized.
double edge_distance(const EdgeMatrix& e_t, const EdgeMatrix& e_s);

/// Numerically stable softmax of logits / temperature.
Vec softmax(const Vec& logits, double temperature = 1.0);

/// -log softmax(logits)[class_index], in nats, computed without forming
/// probabilities. Throws std::invalid_argument for an out-of-range index.
double cross_entropy(const Vec& logits, int class_index);

/// Mean over instances of tau^2 * KL(softmax(t/tau) || softmax(s/tau)).
/// Teacher distribution leads the divergence: the student is pulled onto the
/// teacher's softened output.
double kld_cls_loss(const std::vector<Vec>& teacher_logits,
                    const std::vector<Vec>& student_logits, double temperature);

/// Mean over instances of the summed squared difference of regression
/// outputs. The head-output analogue of node_loss.
double reg_match_loss(const std::vector<Vec>& teacher_reg, const std::vector<Vec>& student_reg);

/// Graph terms only: lambda1 * node_fg + lambda2 * node_bg + lambda3 * edge.
/// Node losses run over ALL nodes of each kind; mining restricts only which
/// nodes carry edges. Throws std::invalid_argument if the two graphs were not
/// built over the same record ids.
LossBreakdown graph_loss(const Graph& g_t, const Graph& g_s, const LossWeights& w,
                         const DistillFlags& flags = DistillFlags{});

/// Full distillation objective: graph terms plus classification KLD plus
/// weighted regression matching. logits/reg lists are positional per
/// instance, teacher and student in the same order.
LossBreakdown total_distill_loss(const Graph& g_t, const Graph& g_s,
                                 const std::vector<Vec>& teacher_logits,
                                 const std::vector<Vec>& student_logits,
                                 const std::vector<Vec>& teacher_reg,
                                 const std::vector<Vec>& student_reg, const LossWeights& w,
                                 const DistillFlags& flags = DistillFlags{});

}  // namespace graphkd
