// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#include "graphkd/trainer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "graphkd/errors.hpp"
#include "graphkd/gradients.hpp"
#include "graphkd/graph.hpp"
#include "graphkd/rng.hpp"

namespace graphkd {

namespace {

int label_index(int label, int num_classes) {
  if (label == kBackgroundLabel) return num_classes;
  if (label < 0 || label >= num_classes) {
    throw std::invalid_argument("supervised loss: label " + std::to_string(label) +
                                " out of range for " + std::to_string(num_classes) + " classes");
  }
  return label;
}

void check_finite(double v, const char* term, int step) {
  if (!std::isfinite(v)) {
    throw NumericalError(std::string("non-finite ") + term + " at step " + std::to_string(step));
  }
}

struct EpisodeGraphs {
  Graph teacher;
  Graph student;
};

EpisodeGraphs build_both_graphs(const EpisodeBatch& batch, const StudentForward& fwd,
                                const TrainConfig& cfg) {
  EpisodeGraphs g{
      build_graph(batch.records, cfg.mining_threshold, cfg.mining_enabled, cfg.norm_epsilon),
      build_graph(batch.records, std::span<const Vec>(fwd.embeddings), cfg.mining_threshold,
                  cfg.mining_enabled, cfg.norm_epsilon),
  };
  return g;
}

std::vector<Vec> teacher_logits_of(const EpisodeBatch& batch) {
  std::vector<Vec> out;
  out.reserve(batch.records.size());
  for (const auto& r : batch.records) out.push_back(r.teacher_logits);
  return out;
}

EvalResult eval_from(const EpisodeBatch& batch, const StudentForward& fwd,
                     const EpisodeGraphs& g, const TrainConfig& cfg) {
  EvalResult out;
  out.distill = total_distill_loss(g.teacher, g.student, teacher_logits_of(batch), fwd.cls_logits,
                                   batch.teacher_reg, fwd.reg_outputs, cfg.weights, cfg.flags);
  out.supervised =
      supervised_loss(fwd.cls_logits, batch.labels(), fwd.reg_outputs, batch.reg_targets);
  out.total = out.supervised + out.distill.total_distill;
  out.edge_distance = edge_distance(g.teacher.edges, g.student.edges);
  out.node_mse_fg = node_loss(g.teacher.nodes.fg_nodes, g.student.nodes.fg_nodes);
  out.node_mse_bg = node_loss(g.teacher.nodes.bg_nodes, g.student.nodes.bg_nodes);
  return out;
}

}  // namespace

double supervised_loss(const std::vector<Vec>& cls_logits, const std::vector<int>& labels,
                       const std::vector<Vec>& reg_outputs, const std::vector<Vec>& reg_targets) {
  const std::size_t n = labels.size();
  if (cls_logits.size() != n || reg_outputs.size() != n || reg_targets.size() != n) {
    throw std::invalid_argument("supervised_loss: batch arrays must have equal lengths");
  }
  if (n == 0) return 0.0;
  const int num_classes = static_cast<int>(cls_logits[0].size()) - 1;
  double ce = 0.0;
  double reg = 0.0;
  std::size_t n_fg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ce += cross_entropy(cls_logits[i], label_index(labels[i], num_classes));
    if (labels[i] != kBackgroundLabel) {
      reg += squared_distance(reg_outputs[i], reg_targets[i]);
      ++n_fg;
    }
  }
  ce /= static_cast<double>(n);
  if (n_fg > 0) reg /= static_cast<double>(n_fg);
  return ce + reg;
}

SupervisedGrads grad_supervised(const std::vector<Vec>& cls_logits, const std::vector<int>& labels,
                                const std::vector<Vec>& reg_outputs,
                                const std::vector<Vec>& reg_targets) {
  const std::size_t n = labels.size();
  if (cls_logits.size() != n || reg_outputs.size() != n || reg_targets.size() != n) {
    throw std::invalid_argument("grad_supervised: batch arrays must have equal lengths");
  }
  SupervisedGrads out;
  out.d_logits.resize(n);
  out.d_reg.resize(n);
  if (n == 0) return out;
  const int num_classes = static_cast<int>(cls_logits[0].size()) - 1;
  std::size_t n_fg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kBackgroundLabel) ++n_fg;
  }
  const double ce_scale = 1.0 / static_cast<double>(n);
  const double reg_scale = n_fg > 0 ? 2.0 / static_cast<double>(n_fg) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec dl = softmax(cls_logits[i]);
    dl[static_cast<std::size_t>(label_index(labels[i], num_classes))] -= 1.0;
    for (double& v : dl) v *= ce_scale;
    out.d_logits[i] = std::move(dl);
    Vec dr(reg_outputs[i].size(), 0.0);
    if (labels[i] != kBackgroundLabel) {
      for (std::size_t k = 0; k < dr.size(); ++k) {
        dr[k] = reg_scale * (reg_outputs[i][k] - reg_targets[i][k]);
      }
    }
    out.d_reg[i] = std::move(dr);
  }
  return out;
}

EvalResult evaluate_episode(const EpisodeBatch& batch, const StudentModel& student,
                            const TrainConfig& cfg) {
  const StudentForward fwd = student.forward(batch.inputs());
  const EpisodeGraphs g = build_both_graphs(batch, fwd, cfg);
  return eval_from(batch, fwd, g, cfg);
}

EpisodeStep evaluate_and_grad(const EpisodeBatch& batch, const StudentModel& student,
                              const TrainConfig& cfg) {
  const std::vector<Vec> inputs = batch.inputs();
  const StudentForward fwd = student.forward(inputs);
  const EpisodeGraphs g = build_both_graphs(batch, fwd, cfg);

  EpisodeStep out;
  out.eval = eval_from(batch, fwd, g, cfg);

  const GradBundle bundle =
      grad_total(g.teacher, g.student, teacher_logits_of(batch), fwd.cls_logits, batch.teacher_reg,
                 fwd.reg_outputs, cfg.weights, cfg.flags, cfg.norm_epsilon);
  // Scatter node gradients from fg-then-bg order back to record order, then
  // fold in the supervised head gradients.
  std::vector<Vec> d_emb(batch.records.size());
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    d_emb[i] = Vec(fwd.embeddings[i].size(), 0.0);
  }
  for (std::size_t j = 0; j < bundle.node_ids.size(); ++j) {
    const int id = bundle.node_ids[j];
    if (id < 0 || static_cast<std::size_t>(id) >= d_emb.size()) {
      throw std::invalid_argument("evaluate_and_grad: node id " + std::to_string(id) +
                                  " outside the record range");
    }
    axpy(1.0, bundle.d_nodes[j], d_emb[static_cast<std::size_t>(id)]);
  }
  SupervisedGrads sup =
      grad_supervised(fwd.cls_logits, batch.labels(), fwd.reg_outputs, batch.reg_targets);
  for (std::size_t i = 0; i < sup.d_logits.size(); ++i) {
    axpy(1.0, bundle.d_logits[i], sup.d_logits[i]);
    axpy(1.0, bundle.d_reg[i], sup.d_reg[i]);
  }
  out.param_grad = student.backward(inputs, fwd, d_emb, sup.d_logits, sup.d_reg);
  return out;
}

Trainer::Trainer(const EpisodeConfig& ecfg, const TrainConfig& tcfg)
    : ecfg_(ecfg),
      tcfg_(tcfg),
      teacher_(make_teacher(ecfg, derive_seed(tcfg.seed, kStreamTeacher))),
      student_(StudentModel::random_init(ecfg.input_dim, tcfg.student_hidden, ecfg.embed_dim,
                                         ecfg.num_classes,
                                         derive_seed(tcfg.seed, kStreamStudent))) {
  if (tcfg_.steps < 1) throw ValidationError("train config: steps must be >= 1");
  if (tcfg_.batch_episodes < 1) throw ValidationError("train config: batch_episodes must be >= 1");
  if (!(tcfg_.learning_rate > 0.0)) {
    throw ValidationError("train config: learning_rate must be positive");
  }
  if (student_.parameter_count() >= teacher_.parameter_count()) {
    throw ValidationError("train config: student must be smaller than the teacher (" +
                          std::to_string(student_.parameter_count()) + " vs " +
                          std::to_string(teacher_.parameter_count()) +
                          " parameters); lower train.student_hidden");
  }
  adam_m_.assign(student_.parameter_count(), 0.0);
  adam_v_.assign(student_.parameter_count(), 0.0);
  sgd_buf_.assign(student_.parameter_count(), 0.0);
}

StepMetrics Trainer::step() {
  ++step_index_;
  const double inv_b = 1.0 / static_cast<double>(tcfg_.batch_episodes);
  Vec grad(student_.parameter_count(), 0.0);
  StepMetrics m;
  m.step = step_index_;
  for (int b = 0; b < tcfg_.batch_episodes; ++b) {
    const std::uint64_t episode_seed =
        derive_seed(tcfg_.seed, kStreamEpisode, static_cast<std::uint64_t>(step_index_),
                    static_cast<std::uint64_t>(b));
    const EpisodeBatch batch = gen_episode(ecfg_, teacher_, episode_seed);
    const EpisodeStep es = evaluate_and_grad(batch, student_, tcfg_);
    axpy(inv_b, es.param_grad, grad);
    m.distill.node_fg += inv_b * es.eval.distill.node_fg;
    m.distill.node_bg += inv_b * es.eval.distill.node_bg;
    m.distill.edge += inv_b * es.eval.distill.edge;
    m.distill.kld_cls += inv_b * es.eval.distill.kld_cls;
    m.distill.reg_match += inv_b * es.eval.distill.reg_match;
    m.distill.lambda2_used += inv_b * es.eval.distill.lambda2_used;
    m.distill.total_distill += inv_b * es.eval.distill.total_distill;
    m.supervised += inv_b * es.eval.supervised;
    m.edge_distance += inv_b * es.eval.edge_distance;
    m.node_mse_fg += inv_b * es.eval.node_mse_fg;
    m.node_mse_bg += inv_b * es.eval.node_mse_bg;
  }
  m.total = m.supervised + m.distill.total_distill;
  check_finite(m.supervised, "supervised loss", step_index_);
  check_finite(m.distill.node_fg, "foreground node loss", step_index_);
  check_finite(m.distill.node_bg, "background node loss", step_index_);
  check_finite(m.distill.edge, "edge loss", step_index_);
  check_finite(m.distill.kld_cls, "classification KLD", step_index_);
  check_finite(m.distill.reg_match, "regression match loss", step_index_);
  check_finite(m.total, "total loss", step_index_);

  Vec& p = student_.params();
  if (tcfg_.optimizer == Optimizer::kAdam) {
    const double b1 = tcfg_.adam_beta1;
    const double b2 = tcfg_.adam_beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(step_index_));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(step_index_));
    for (std::size_t i = 0; i < p.size(); ++i) {
      adam_m_[i] = b1 * adam_m_[i] + (1.0 - b1) * grad[i];
      adam_v_[i] = b2 * adam_v_[i] + (1.0 - b2) * grad[i] * grad[i];
      const double mhat = adam_m_[i] / corr1;
      const double vhat = adam_v_[i] / corr2;
      p[i] -= tcfg_.learning_rate * mhat / (std::sqrt(vhat) + tcfg_.adam_eps);
    }
  } else {
    for (std::size_t i = 0; i < p.size(); ++i) {
      sgd_buf_[i] = tcfg_.momentum * sgd_buf_[i] + grad[i];
      p[i] -= tcfg_.learning_rate * sgd_buf_[i];
    }
  }
  return m;
}

std::vector<StepMetrics> Trainer::run(const std::function<void(const StepMetrics&)>& on_step) {
  std::vector<StepMetrics> series;
  series.reserve(static_cast<std::size_t>(tcfg_.steps));
  for (int s = 0; s < tcfg_.steps; ++s) {
    series.push_back(step());
    if (on_step) on_step(series.back());
  }
  return series;
}

RunResult run_distillation(const EpisodeConfig& ecfg, const TrainConfig& tcfg,
                           const std::function<void(const StepMetrics&)>& on_step) {
  Trainer trainer(ecfg, tcfg);
  std::vector<StepMetrics> series = trainer.run(on_step);
  return RunResult{std::move(series), trainer.student(), trainer.teacher()};
}

std::vector<AblationRow> run_ablation(const EpisodeConfig& ecfg, const TrainConfig& tcfg) {
  struct RowSpec {
    const char* name;
    bool edge, fg_node, bg_node;
  };
  constexpr RowSpec kRows[] = {
      {"baseline", false, false, false},
      {"edg", true, false, false},
      {"edg_fgn", true, true, false},
      {"edg_fgn_bgn", true, true, true},
  };
  std::vector<AblationRow> rows;
  rows.reserve(4);
  for (const RowSpec& spec : kRows) {
    TrainConfig row_cfg = tcfg;
    row_cfg.flags.edge = spec.edge;
    row_cfg.flags.fg_node = spec.fg_node;
    row_cfg.flags.bg_node = spec.bg_node;
    row_cfg.flags.logits = false;
    Trainer trainer(ecfg, row_cfg);
    const std::vector<StepMetrics> series = trainer.run();
    const StepMetrics& last = series.back();
    AblationRow row;
    row.name = spec.name;
    row.edge = spec.edge;
    row.fg_node = spec.fg_node;
    row.bg_node = spec.bg_node;
    row.supervised = last.supervised;
    row.node_mse_fg = last.node_mse_fg;
    row.node_mse_bg = last.node_mse_bg;
    row.edge_distance = last.edge_distance;
    row.combined =
        last.node_mse_fg + last.distill.lambda2_used * last.node_mse_bg + last.edge_distance;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace graphkd
