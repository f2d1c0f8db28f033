// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "graphkd/graph.hpp"
#include "graphkd/matrix.hpp"

namespace graphkd {

/// Inclusive integer range for per-episode instance counts.
struct CountRange {
  int lo = 0;
  int hi = 0;
};

/// Shape of one synthetic "image": class count, per-class foreground range,
/// background range, feature dims, cluster geometry. Instance counts vary per
/// episode within the given ranges.
struct EpisodeConfig {
  int num_classes = 4;
  CountRange fg_per_class{2, 6};
  CountRange bg_count{8, 24};
  int input_dim = 32;
  int embed_dim = 16;
  double cluster_spread = 0.1;  // fg noise scale around class centroids
  double bg_overlap = 0.25;     // fraction of bg placed near fg clusters (hard negatives)
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument naming the offending field if cfg violates
/// its constraints (C >= 2, dims >= 2, C <= min(F, D), ranges ordered and
/// nonnegative, spread > 0, overlap in [0, 1]).
void validate_episode_config(const EpisodeConfig& cfg);

/// Batched affine-map outputs, positional per instance.
struct TeacherOutputs {
  std::vector<Vec> embeddings;
  std::vector<Vec> cls_logits;
  std::vector<Vec> reg_outputs;
};

/// Frozen linear teacher: an input->embedding map constructed so class
/// clusters land on orthonormal directions in embedding space, plus
/// classification and regression heads that read those directions. All
/// parameters are fixed at construction, deterministic from the seed.
class TeacherModel {
 public:
  TeacherModel(Matrix embed_w, Vec embed_b, Matrix cls_w, Vec cls_b, Matrix reg_w, Vec reg_b);

  const Matrix& embed_w() const { return embed_w_; }
  const Vec& embed_b() const { return embed_b_; }
  const Matrix& cls_w() const { return cls_w_; }
  const Vec& cls_b() const { return cls_b_; }
  const Matrix& reg_w() const { return reg_w_; }
  const Vec& reg_b() const { return reg_b_; }

  int input_dim() const { return static_cast<int>(embed_w_.cols()); }
  int embed_dim() const { return static_cast<int>(embed_w_.rows()); }
  int num_classes() const { return static_cast<int>(cls_w_.rows()) - 1; }
  std::size_t parameter_count() const;

  /// Affine maps applied per instance. Throws std::invalid_argument on a
  /// dimension mismatch.
  TeacherOutputs forward(const std::vector<Vec>& inputs) const;

  /// Flat copy of every parameter, for frozen-teacher assertions.
  Vec flat_parameters() const;

 private:
  Matrix embed_w_;
  Vec embed_b_;
  Matrix cls_w_;
  Vec cls_b_;
  Matrix reg_w_;
  Vec reg_b_;
};

/// Deterministic teacher for the given episode shape.
TeacherModel make_teacher(const EpisodeConfig& cfg, std::uint64_t seed);

/// Per-instance cross-entropy of the teacher's classification logits against
/// the labels (background maps to the final class index). This is the mining
/// signal stored on each record.
Vec teacher_instance_cls_loss(const TeacherModel& teacher, const std::vector<Vec>& inputs,
                              const std::vector<int>& labels);

/// Cached activations of one student forward pass, kept for backprop.
struct StudentForward {
  std::vector<Vec> hidden;      // post-tanh first-layer activations
  std::vector<Vec> embeddings;
  std::vector<Vec> cls_logits;
  std::vector<Vec> reg_outputs;
};

/// Small trainable student: two-layer tanh embedding map plus linear
/// classification and regression heads, all parameters in one flat vector so
/// optimizers and weight-space checks can treat it as a point in R^P. tanh is
/// smooth everywhere, which keeps finite-difference checks exact.
class StudentModel {
 public:
  StudentModel(int input_dim, int hidden_dim, int embed_dim, int num_classes);

  /// Gaussian init scaled by 1/sqrt(fan-in), biases zero.
  static StudentModel random_init(int input_dim, int hidden_dim, int embed_dim, int num_classes,
                                  std::uint64_t seed);

  int input_dim() const { return f_; }
  int hidden_dim() const { return h_; }
  int embed_dim() const { return d_; }
  int num_classes() const { return c_; }
  std::size_t parameter_count() const { return params_.size(); }
  const Vec& params() const { return params_; }
  Vec& params() { return params_; }

  StudentForward forward(const std::vector<Vec>& inputs) const;

  /// Backprop of upstream gradients (w.r.t. embeddings, logits and reg
  /// outputs, positional per instance) into a flat parameter gradient aligned
  /// with params(). Any upstream list may be empty to mean all-zero.
  Vec backward(const std::vector<Vec>& inputs, const StudentForward& fwd,
               const std::vector<Vec>& d_embeddings, const std::vector<Vec>& d_logits,
               const std::vector<Vec>& d_reg) const;

 private:
  int f_, h_, d_, c_;
  std::size_t w1_, b1_, w2_, b2_, wc_, bc_, wr_, br_;  // offsets into params_
  Vec params_;
};

/// One synthetic episode: records (foreground first, grouped by class, then
/// background; ids 0..N-1), the teacher's regression outputs, and the
/// supervised regression targets, all positional per record.
struct EpisodeBatch {
  std::vector<InstanceRecord> records;
  std::vector<Vec> teacher_reg;
  std::vector<Vec> reg_targets;
  int num_classes = 0;

  std::vector<Vec> inputs() const;
  std::vector<int> labels() const;
};

/// Sample an episode: foreground as centroid + clipped Gaussian noise,
/// background as a bg_overlap mixture of near-cluster points (radius between
/// 1.25 and 2 fg radii from a random centroid) and diffuse points kept at
/// least two fg radii from every centroid. Teacher fields are filled by the
/// given frozen teacher. Pure function of (cfg, teacher, seed).
EpisodeBatch gen_episode(const EpisodeConfig& cfg, const TeacherModel& teacher,
                         std::uint64_t seed);

/// Supervised regression target: means of four contiguous blocks of the
/// input vector.
Vec block_mean_target(const Vec& input);

}  // namespace graphkd
