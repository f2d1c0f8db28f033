// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "graphkd/graph.hpp"
#include "graphkd/losses.hpp"
#include "graphkd/matrix.hpp"

namespace graphkd {

/// Gradients of the distillation objective w.r.t. everything the student
/// produced. d_nodes runs over all student nodes, foreground first then
/// background, with node_ids recording the alignment; d_logits and d_reg are
/// positional per instance, in the order the forward outputs were given.
struct GradBundle {
  std::vector<int> node_ids;
  std::vector<Vec> d_nodes;
  std::vector<Vec> d_logits;
  std::vector<Vec> d_reg;
};

/// Outcome of comparing an analytic gradient against central differences.
struct GradCheckReport {
  double max_rel_error = 0.0;
  Vec per_coordinate_errors;
  double step_size = 0.0;
  double tolerance = 0.0;
  long worst_coordinate = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  bool passed = false;
};

/// d/ds_i of node_loss: (2/N)(s_i - t_i). Empty input gives an empty list.
std::vector<Vec> grad_node_loss(const std::vector<Vec>& teacher_nodes,
                                const std::vector<Vec>& student_nodes);

/// d/dv_p of edge_loss between the teacher matrix and the student matrix
/// implied by `student_nodes` (participant order must match e_t.node_ids).
/// Each node contributes through its row and column; the diagonal is constant
/// and contributes nothing. Nodes with norm below eps get a zero gradient and
/// their edges are treated as constants.
std::vector<Vec> grad_edge_loss(const std::vector<Vec>& student_nodes, const EdgeMatrix& e_t,
                                double eps = kNormEpsilon);

/// Masked variant backing the strict fg-linked edge reading: pairs with both
/// endpoints background are zero-weighted when fg_linked_only.
std::vector<Vec> grad_edge_loss(const std::vector<Vec>& student_nodes, const EdgeMatrix& e_t,
                                const std::vector<bool>& is_fg_participant, bool fg_linked_only,
                                double eps);

/// d/ds of kld_cls_loss: tau * (softmax(s/tau) - softmax(t/tau)) / batch.
/// Components sum to zero per instance.
std::vector<Vec> grad_kld_cls(const std::vector<Vec>& teacher_logits,
                              const std::vector<Vec>& student_logits, double temperature);

/// d/ds of reg_match_loss: (2/batch)(s - t) per instance.
std::vector<Vec> grad_reg_match(const std::vector<Vec>& teacher_reg,
                                const std::vector<Vec>& student_reg);

/// Weighted sum of the term gradients for the full distillation objective,
/// mirroring total_distill_loss. lambda2 and the mined participant set are
/// constants of the batch (hard selections do not carry gradient). Masked
/// terms contribute zero.
GradBundle grad_total(const Graph& g_t, const Graph& g_s, const std::vector<Vec>& teacher_logits,
                      const std::vector<Vec>& student_logits, const std::vector<Vec>& teacher_reg,
                      const std::vector<Vec>& student_reg, const LossWeights& w,
                      const DistillFlags& flags = DistillFlags{}, double eps = kNormEpsilon);

/// The student-side quantities a finite-difference check perturbs, positional
/// per instance (record order).
struct StudentOutputs {
  std::vector<Vec> embeddings;
  std::vector<Vec> cls_logits;
  std::vector<Vec> reg_outputs;
};

/// Concatenate [all embeddings | all logits | all reg outputs] into one flat
/// vector, and the inverse given a same-shaped template.
Vec flatten_outputs(const StudentOutputs& o);
StudentOutputs unflatten_outputs(std::span<const double> flat, const StudentOutputs& shape);

/// Arrange a GradBundle as the flat counterpart of flatten_outputs:
/// node gradients are scattered from fg-then-bg order back to record order
/// via record_ids (the instance id at each record position).
Vec flatten_grad_bundle(const GradBundle& bundle, const std::vector<int>& record_ids);

/// Scalar function of a flat parameter vector, as seen by finite differences.
using LossFn = std::function<double(std::span<const double>)>;

/// Central-difference verification of `analytic_grad` at `point`:
/// f_i = (loss(x + h e_i) - loss(x - h e_i)) / 2h, relative error
/// |a_i - f_i| / max(1e-12, |a_i| + |f_i|). A non-finite loss value marks the
/// coordinate with an infinite error and fails the report.
GradCheckReport finite_diff_check(const LossFn& loss_fn, const Vec& point,
                                  const Vec& analytic_grad, double step, double tolerance);

}  // namespace graphkd
