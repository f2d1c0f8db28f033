// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "graphkd/losses.hpp"
#include "graphkd/synth.hpp"

namespace graphkd {

enum class Optimizer { kAdam, kSgdMomentum };

/// Everything the optimization loop needs beyond the episode shape. The one
/// seed drives every stream: teacher construction, student init, and one
/// fresh episode per (step, slot).
struct TrainConfig {
  int steps = 2000;
  int batch_episodes = 2;
  Optimizer optimizer = Optimizer::kAdam;
  double learning_rate = 1e-3;
  double momentum = 0.9;       // sgd-momentum only
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int student_hidden = 10;
  LossWeights weights;
  bool mining_enabled = true;
  double mining_threshold = 0.357;  // roughly -ln 0.7
  double norm_epsilon = kNormEpsilon;
  DistillFlags flags;
  std::uint64_t seed = 0;
};

/// Per-step record. The diagnostics (edge_distance, node_mse_*) are always
/// computed from the full graphs regardless of which loss terms are active,
/// so ablated runs can still be compared on them.
struct StepMetrics {
  int step = 0;  // 1-based
  LossBreakdown distill;
  double supervised = 0.0;
  double total = 0.0;  // supervised + distill.total_distill
  double edge_distance = 0.0;
  double node_mse_fg = 0.0;
  double node_mse_bg = 0.0;
};

/// Toy stand-in for detector supervision: mean cross-entropy of the student's
/// classification logits over all instances (background maps to the final
/// class) plus mean squared regression error over foreground instances only,
/// mirroring how box regression applies to matched proposals.
double supervised_loss(const std::vector<Vec>& cls_logits, const std::vector<int>& labels,
                       const std::vector<Vec>& reg_outputs, const std::vector<Vec>& reg_targets);

struct SupervisedGrads {
  std::vector<Vec> d_logits;
  std::vector<Vec> d_reg;
};

/// Gradients of supervised_loss w.r.t. the student's head outputs.
SupervisedGrads grad_supervised(const std::vector<Vec>& cls_logits, const std::vector<int>& labels,
                                const std::vector<Vec>& reg_outputs,
                                const std::vector<Vec>& reg_targets);

/// Losses and diagnostics of one episode under the current student.
struct EvalResult {
  LossBreakdown distill;
  double supervised = 0.0;
  double total = 0.0;
  double edge_distance = 0.0;
  double node_mse_fg = 0.0;
  double node_mse_bg = 0.0;
};

EvalResult evaluate_episode(const EpisodeBatch& batch, const StudentModel& student,
                            const TrainConfig& cfg);

/// EvalResult plus the flat parameter gradient of supervised + active distill
/// terms, for one episode.
struct EpisodeStep {
  EvalResult eval;
  Vec param_grad;
};

EpisodeStep evaluate_and_grad(const EpisodeBatch& batch, const StudentModel& student,
                              const TrainConfig& cfg);

/// Owns the frozen teacher, the student, and optimizer state. Episodes are
/// resampled every step from seeds derived per (step, slot), so two trainers
/// with the same configs see identical data.
class Trainer {
 public:
  Trainer(const EpisodeConfig& ecfg, const TrainConfig& tcfg);

  const TeacherModel& teacher() const { return teacher_; }
  const StudentModel& student() const { return student_; }

  /// One optimizer step over batch_episodes fresh episodes. Metrics reflect
  /// the student BEFORE the update. Throws NumericalError naming the term if
  /// any loss value is non-finite.
  StepMetrics step();

  /// Full loop; invokes on_step after each step when given.
  std::vector<StepMetrics> run(const std::function<void(const StepMetrics&)>& on_step = {});

 private:
  EpisodeConfig ecfg_;
  TrainConfig tcfg_;
  TeacherModel teacher_;
  StudentModel student_;
  Vec adam_m_, adam_v_, sgd_buf_;
  int step_index_ = 0;
};

struct RunResult {
  std::vector<StepMetrics> metrics;
  StudentModel student;
  TeacherModel teacher;
};

RunResult run_distillation(const EpisodeConfig& ecfg, const TrainConfig& tcfg,
                           const std::function<void(const StepMetrics&)>& on_step = {});

/// One ablation row: which distill terms were active and the final-step
/// metrics of a full run. The combined discrepancy folds the three graph
/// diagnostics into one score for informal comparison.
struct AblationRow {
  std::string name;
  bool edge = false;
  bool fg_node = false;
  bool bg_node = false;
  double supervised = 0.0;
  double node_mse_fg = 0.0;
  double node_mse_bg = 0.0;
  double edge_distance = 0.0;
  double combined = 0.0;  // node_mse_fg + lambda2 * node_mse_bg + edge_distance
};

/// The four-row ladder: supervision only, then +edge, +foreground nodes,
/// +background nodes, all sharing the base seed. Logits matching stays off in
/// every row so the ladder isolates the graph terms.
std::vector<AblationRow> run_ablation(const EpisodeConfig& ecfg, const TrainConfig& tcfg);

}  // namespace graphkd
