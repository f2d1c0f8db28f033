// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#include "graphkd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "graphkd/losses.hpp"
#include "graphkd/rng.hpp"

namespace graphkd {

namespace {

// Geometry and head constants of the constructed teacher. Centroids sit at
// kInputScale along distinct input axes; the classification head reads the
// matching embedding directions with gain kClsGain against bias kClsBias, and
// the background row is flat at kBgBias. At these operating points foreground
// is classified confidently, near-cluster background lands well above the
// default mining threshold, and diffuse background straddles it.
constexpr double kInputScale = 3.0;
constexpr double kClsGain = 2.0;
constexpr double kClsBias = 3.0;
constexpr double kBgBias = 1.5;
constexpr double kEmbedBiasScale = 1.0;
constexpr double kRegWeightScale = 0.3;
constexpr double kRegBiasScale = 0.1;
constexpr double kSingularMajor = 1.0;  // class directions
constexpr double kSingularMinor = 0.8;  // filler directions
constexpr double kCentroidMix = 0.5;    // adjacent-class leakage, see class_centroid
constexpr int kMinRank = 8;

// Draw Gaussian vectors (optionally with a zeroed coordinate prefix) and
// orthonormalize them against `basis`, appending `count` new unit columns.
void extend_orthonormal(Rng& rng, std::size_t dim, std::size_t count, std::size_t zero_prefix,
                        std::vector<Vec>& basis) {
  for (std::size_t added = 0; added < count; ++added) {
    for (;;) {
      Vec v = rng.normal_vec(dim);
      for (std::size_t i = 0; i < zero_prefix && i < dim; ++i) v[i] = 0.0;
      for (const Vec& b : basis) axpy(-dot(v, b), b, v);
      const double n = std::sqrt(squared_norm(v));
      if (n > 1e-6) {
        for (double& x : v) x /= n;
        basis.push_back(std::move(v));
        break;
      }
    }
  }
}

// Centroid of class c: mostly its own input axis plus a kCentroidMix share of
// the next class's axis (cyclically). The leakage gives adjacent classes a
// specific nonzero embedding cosine, kMix/(1+kMix^2), that only direct
// structure matching reproduces; classification pressure alone settles on its
// own cross-class angles.
Vec class_centroid(int c, int input_dim, int num_classes) {
  Vec mu(static_cast<std::size_t>(input_dim), 0.0);
  const double scale = kInputScale / std::sqrt(1.0 + kCentroidMix * kCentroidMix);
  mu[static_cast<std::size_t>(c)] = scale;
  mu[static_cast<std::size_t>((c + 1) % num_classes)] += scale * kCentroidMix;
  return mu;
}

void check_range(const CountRange& r, const char* name) {
  if (r.lo < 0 || r.hi < r.lo) {
    throw std::invalid_argument(std::string("episode config: ") + name +
                                " must satisfy 0 <= lo <= hi");
  }
}

}  // namespace

void validate_episode_config(const EpisodeConfig& cfg) {
  if (cfg.num_classes < 2) throw std::invalid_argument("episode config: num_classes must be >= 2");
  if (cfg.input_dim < 2) throw std::invalid_argument("episode config: input_dim must be >= 2");
  if (cfg.embed_dim < 2) throw std::invalid_argument("episode config: embed_dim must be >= 2");
  if (cfg.num_classes > cfg.input_dim || cfg.num_classes > cfg.embed_dim) {
    // Each class owns one input axis and one embedding direction.
    throw std::invalid_argument("episode config: num_classes must not exceed input_dim or embed_dim");
  }
  check_range(cfg.fg_per_class, "fg_per_class");
  check_range(cfg.bg_count, "bg_count");
  if (!(cfg.cluster_spread > 0.0)) {
    throw std::invalid_argument("episode config: cluster_spread must be positive");
  }
  if (cfg.bg_overlap < 0.0 || cfg.bg_overlap > 1.0) {
    throw std::invalid_argument("episode config: bg_overlap must lie in [0, 1]");
  }
}

TeacherModel::TeacherModel(Matrix embed_w, Vec embed_b, Matrix cls_w, Vec cls_b, Matrix reg_w,
                           Vec reg_b)
    : embed_w_(std::move(embed_w)),
      embed_b_(std::move(embed_b)),
      cls_w_(std::move(cls_w)),
      cls_b_(std::move(cls_b)),
      reg_w_(std::move(reg_w)),
      reg_b_(std::move(reg_b)) {
  const std::size_t d = embed_w_.rows();
  if (embed_b_.size() != d || cls_w_.cols() != d || reg_w_.cols() != d ||
      cls_b_.size() != cls_w_.rows() || reg_b_.size() != reg_w_.rows()) {
    throw std::invalid_argument("TeacherModel: inconsistent parameter shapes");
  }
}

std::size_t TeacherModel::parameter_count() const {
  return embed_w_.rows() * embed_w_.cols() + embed_b_.size() + cls_w_.rows() * cls_w_.cols() +
         cls_b_.size() + reg_w_.rows() * reg_w_.cols() + reg_b_.size();
}

TeacherOutputs TeacherModel::forward(const std::vector<Vec>& inputs) const {
  TeacherOutputs out;
  out.embeddings.reserve(inputs.size());
  out.cls_logits.reserve(inputs.size());
  out.reg_outputs.reserve(inputs.size());
  for (const Vec& x : inputs) {
    if (x.size() != embed_w_.cols()) {
      throw std::invalid_argument("teacher forward: input dim " + std::to_string(x.size()) +
                                  ", expected " + std::to_string(embed_w_.cols()));
    }
    Vec e = embed_w_.matvec(x);
    axpy(1.0, embed_b_, e);
    Vec logits = cls_w_.matvec(e);
    axpy(1.0, cls_b_, logits);
    Vec reg = reg_w_.matvec(e);
    axpy(1.0, reg_b_, reg);
    out.embeddings.push_back(std::move(e));
    out.cls_logits.push_back(std::move(logits));
    out.reg_outputs.push_back(std::move(reg));
  }
  return out;
}

Vec TeacherModel::flat_parameters() const {
  Vec flat;
  flat.reserve(parameter_count());
  auto push_matrix = [&flat](const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
    }
  };
  push_matrix(embed_w_);
  flat.insert(flat.end(), embed_b_.begin(), embed_b_.end());
  push_matrix(cls_w_);
  flat.insert(flat.end(), cls_b_.begin(), cls_b_.end());
  push_matrix(reg_w_);
  flat.insert(flat.end(), reg_b_.begin(), reg_b_.end());
  return flat;
}

TeacherModel make_teacher(const EpisodeConfig& cfg, std::uint64_t seed) {
  validate_episode_config(cfg);
  const int c_count = cfg.num_classes;
  const int f = cfg.input_dim;
  const int d = cfg.embed_dim;
  const int rank = std::min({d, f, std::max(c_count, kMinRank)});
  Rng rng(seed);

  // Embedding map U diag(s) V^T. The first num_classes right directions are
  // the centroid axes, so class c maps onto the orthonormal left direction
  // u_c; filler directions give background inputs somewhere to land.
  std::vector<Vec> u_cols;
  extend_orthonormal(rng, static_cast<std::size_t>(d), static_cast<std::size_t>(rank), 0, u_cols);
  std::vector<Vec> v_cols;
  for (int c = 0; c < std::min(c_count, rank); ++c) {
    Vec e(static_cast<std::size_t>(f), 0.0);
    e[static_cast<std::size_t>(c)] = 1.0;
    v_cols.push_back(std::move(e));
  }
  extend_orthonormal(rng, static_cast<std::size_t>(f),
                     static_cast<std::size_t>(rank) - v_cols.size(),
                     static_cast<std::size_t>(c_count), v_cols);

  Matrix embed_w(static_cast<std::size_t>(d), static_cast<std::size_t>(f));
  for (int k = 0; k < rank; ++k) {
    const double s = k < c_count ? kSingularMajor : kSingularMinor;
    for (int i = 0; i < d; ++i) {
      const double us = u_cols[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] * s;
      for (int j = 0; j < f; ++j) {
        embed_w(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) +=
            us * v_cols[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      }
    }
  }
  // The embedding bias lives in the filler directions only. The class rows of
  // the classification head read u_0..u_{C-1}, so this shared offset leaves
  // every logit untouched while tilting all pairwise cosines by a specific
  // amount that only direct embedding matching reproduces.
  Vec embed_b(static_cast<std::size_t>(d), 0.0);
  for (int k = c_count; k < rank; ++k) {
    axpy(kEmbedBiasScale * rng.normal(), u_cols[static_cast<std::size_t>(k)], embed_b);
  }

  Matrix cls_w(static_cast<std::size_t>(c_count) + 1, static_cast<std::size_t>(d));
  Vec cls_b(static_cast<std::size_t>(c_count) + 1, 0.0);
  for (int c = 0; c < c_count; ++c) {
    for (int i = 0; i < d; ++i) {
      cls_w(static_cast<std::size_t>(c), static_cast<std::size_t>(i)) =
          kClsGain * u_cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
    }
    cls_b[static_cast<std::size_t>(c)] = -kClsBias;
  }
  cls_b[static_cast<std::size_t>(c_count)] = kBgBias;  // background row: flat weights

  Matrix reg_w(4, static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < reg_w.rows(); ++i) {
    for (std::size_t j = 0; j < reg_w.cols(); ++j) {
      reg_w(i, j) = kRegWeightScale * rng.normal();
    }
  }
  Vec reg_b(4);
  for (double& b : reg_b) b = kRegBiasScale * rng.normal();

  return TeacherModel(std::move(embed_w), std::move(embed_b), std::move(cls_w), std::move(cls_b),
                      std::move(reg_w), std::move(reg_b));
}

Vec teacher_instance_cls_loss(const TeacherModel& teacher, const std::vector<Vec>& inputs,
                              const std::vector<int>& labels) {
  if (inputs.size() != labels.size()) {
    throw std::invalid_argument("teacher_instance_cls_loss: inputs/labels size mismatch");
  }
  const int c_count = teacher.num_classes();
  const TeacherOutputs outs = teacher.forward(inputs);
  Vec losses(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const int label = labels[i];
    int index = c_count;  // background row
    if (label != kBackgroundLabel) {
      if (label < 0 || label >= c_count) {
        throw std::invalid_argument("teacher_instance_cls_loss: label " + std::to_string(label) +
                                    " out of range for " + std::to_string(c_count) + " classes");
      }
      index = label;
    }
    losses[i] = cross_entropy(outs.cls_logits[i], index);
  }
  return losses;
}

StudentModel::StudentModel(int input_dim, int hidden_dim, int embed_dim, int num_classes)
    : f_(input_dim), h_(hidden_dim), d_(embed_dim), c_(num_classes) {
  if (f_ < 1 || h_ < 1 || d_ < 1 || c_ < 1) {
    throw std::invalid_argument("StudentModel: all dims must be positive");
  }
  const std::size_t f = static_cast<std::size_t>(f_);
  const std::size_t h = static_cast<std::size_t>(h_);
  const std::size_t d = static_cast<std::size_t>(d_);
  const std::size_t heads = static_cast<std::size_t>(c_) + 1;
  w1_ = 0;
  b1_ = w1_ + h * f;
  w2_ = b1_ + h;
  b2_ = w2_ + d * h;
  wc_ = b2_ + d;
  bc_ = wc_ + heads * d;
  wr_ = bc_ + heads;
  br_ = wr_ + 4 * d;
  params_.assign(br_ + 4, 0.0);
}

StudentModel StudentModel::random_init(int input_dim, int hidden_dim, int embed_dim,
                                       int num_classes, std::uint64_t seed) {
  StudentModel m(input_dim, hidden_dim, embed_dim, num_classes);
  Rng rng(seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  const double sh = 1.0 / std::sqrt(static_cast<double>(embed_dim));
  const std::size_t heads = static_cast<std::size_t>(num_classes) + 1;
  for (std::size_t i = 0; i < static_cast<std::size_t>(hidden_dim * input_dim); ++i) {
    m.params_[m.w1_ + i] = s1 * rng.normal();
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(embed_dim * hidden_dim); ++i) {
    m.params_[m.w2_ + i] = s2 * rng.normal();
  }
  for (std::size_t i = 0; i < heads * static_cast<std::size_t>(embed_dim); ++i) {
    m.params_[m.wc_ + i] = sh * rng.normal();
  }
  for (std::size_t i = 0; i < 4 * static_cast<std::size_t>(embed_dim); ++i) {
    m.params_[m.wr_ + i] = sh * rng.normal();
  }
  return m;
}

StudentForward StudentModel::forward(const std::vector<Vec>& inputs) const {
  const std::size_t f = static_cast<std::size_t>(f_);
  const std::size_t h = static_cast<std::size_t>(h_);
  const std::size_t d = static_cast<std::size_t>(d_);
  const std::size_t heads = static_cast<std::size_t>(c_) + 1;
  StudentForward out;
  out.hidden.reserve(inputs.size());
  out.embeddings.reserve(inputs.size());
  out.cls_logits.reserve(inputs.size());
  out.reg_outputs.reserve(inputs.size());
  for (const Vec& x : inputs) {
    if (x.size() != f) {
      throw std::invalid_argument("student forward: input dim " + std::to_string(x.size()) +
                                  ", expected " + std::to_string(f));
    }
    Vec hid(h);
    for (std::size_t j = 0; j < h; ++j) {
      double acc = params_[b1_ + j];
      const std::size_t row = w1_ + j * f;
      for (std::size_t k = 0; k < f; ++k) acc += params_[row + k] * x[k];
      hid[j] = std::tanh(acc);
    }
    Vec emb(d);
    for (std::size_t i = 0; i < d; ++i) {
      double acc = params_[b2_ + i];
      const std::size_t row = w2_ + i * h;
      for (std::size_t j = 0; j < h; ++j) acc += params_[row + j] * hid[j];
      emb[i] = acc;
    }
    Vec logits(heads);
    for (std::size_t cidx = 0; cidx < heads; ++cidx) {
      double acc = params_[bc_ + cidx];
      const std::size_t row = wc_ + cidx * d;
      for (std::size_t i = 0; i < d; ++i) acc += params_[row + i] * emb[i];
      logits[cidx] = acc;
    }
    Vec reg(4);
    for (std::size_t ridx = 0; ridx < 4; ++ridx) {
      double acc = params_[br_ + ridx];
      const std::size_t row = wr_ + ridx * d;
      for (std::size_t i = 0; i < d; ++i) acc += params_[row + i] * emb[i];
      reg[ridx] = acc;
    }
    out.hidden.push_back(std::move(hid));
    out.embeddings.push_back(std::move(emb));
    out.cls_logits.push_back(std::move(logits));
    out.reg_outputs.push_back(std::move(reg));
  }
  return out;
}

Vec StudentModel::backward(const std::vector<Vec>& inputs, const StudentForward& fwd,
                           const std::vector<Vec>& d_embeddings, const std::vector<Vec>& d_logits,
                           const std::vector<Vec>& d_reg) const {
  const std::size_t n = inputs.size();
  if (fwd.hidden.size() != n || fwd.embeddings.size() != n) {
    throw std::invalid_argument("student backward: forward cache does not match inputs");
  }
  auto check_upstream = [n](const std::vector<Vec>& g, const char* name) {
    if (!g.empty() && g.size() != n) {
      throw std::invalid_argument(std::string("student backward: ") + name +
                                  " must be empty or one vector per instance");
    }
  };
  check_upstream(d_embeddings, "d_embeddings");
  check_upstream(d_logits, "d_logits");
  check_upstream(d_reg, "d_reg");

  const std::size_t f = static_cast<std::size_t>(f_);
  const std::size_t h = static_cast<std::size_t>(h_);
  const std::size_t d = static_cast<std::size_t>(d_);
  const std::size_t heads = static_cast<std::size_t>(c_) + 1;
  Vec grad(params_.size(), 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const Vec& x = inputs[i];
    const Vec& hid = fwd.hidden[i];
    const Vec& emb = fwd.embeddings[i];
    Vec dv(d, 0.0);
    if (!d_embeddings.empty()) {
      for (std::size_t k = 0; k < d; ++k) dv[k] = d_embeddings[i][k];
    }
    if (!d_logits.empty()) {
      const Vec& dl = d_logits[i];
      for (std::size_t cidx = 0; cidx < heads; ++cidx) {
        const std::size_t row = wc_ + cidx * d;
        grad[bc_ + cidx] += dl[cidx];
        for (std::size_t k = 0; k < d; ++k) {
          grad[row + k] += dl[cidx] * emb[k];
          dv[k] += params_[row + k] * dl[cidx];
        }
      }
    }
    if (!d_reg.empty()) {
      const Vec& dr = d_reg[i];
      for (std::size_t ridx = 0; ridx < 4; ++ridx) {
        const std::size_t row = wr_ + ridx * d;
        grad[br_ + ridx] += dr[ridx];
        for (std::size_t k = 0; k < d; ++k) {
          grad[row + k] += dr[ridx] * emb[k];
          dv[k] += params_[row + k] * dr[ridx];
        }
      }
    }
    // Through the embedding layer, then tanh.
    Vec dh(h, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t row = w2_ + k * h;
      grad[b2_ + k] += dv[k];
      for (std::size_t j = 0; j < h; ++j) {
        grad[row + j] += dv[k] * hid[j];
        dh[j] += params_[row + j] * dv[k];
      }
    }
    for (std::size_t j = 0; j < h; ++j) {
      const double dpre = dh[j] * (1.0 - hid[j] * hid[j]);
      const std::size_t row = w1_ + j * f;
      grad[b1_ + j] += dpre;
      for (std::size_t k = 0; k < f; ++k) grad[row + k] += dpre * x[k];
    }
  }
  return grad;
}

std::vector<Vec> EpisodeBatch::inputs() const {
  std::vector<Vec> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.input_feature);
  return out;
}

std::vector<int> EpisodeBatch::labels() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

Vec block_mean_target(const Vec& input) {
  Vec target(4, 0.0);
  const std::size_t n = input.size();
  for (std::size_t b = 0; b < 4; ++b) {
    const std::size_t start = b * n / 4;
    const std::size_t end = (b + 1) * n / 4;
    if (end == start) continue;
    double acc = 0.0;
    for (std::size_t i = start; i < end; ++i) acc += input[i];
    target[b] = acc / static_cast<double>(end - start);
  }
  return target;
}

EpisodeBatch gen_episode(const EpisodeConfig& cfg, const TeacherModel& teacher,
                         std::uint64_t seed) {
  validate_episode_config(cfg);
  if (teacher.input_dim() != cfg.input_dim || teacher.embed_dim() != cfg.embed_dim ||
      teacher.num_classes() != cfg.num_classes) {
    throw std::invalid_argument("gen_episode: teacher shape does not match episode config");
  }
  const int c_count = cfg.num_classes;
  const std::size_t f = static_cast<std::size_t>(cfg.input_dim);
  Rng rng(seed);

  std::vector<Vec> centroids;
  centroids.reserve(static_cast<std::size_t>(c_count));
  for (int c = 0; c < c_count; ++c) {
    centroids.push_back(class_centroid(c, cfg.input_dim, c_count));
  }

  // Foreground radius: noise is clipped to 2 sqrt(F) before scaling, so no fg
  // point sits farther than fg_radius from its centroid. Diffuse background
  // keeps twice that margin from every centroid.
  const double max_noise_norm = 2.0 * std::sqrt(static_cast<double>(f));
  const double fg_radius = cfg.cluster_spread * max_noise_norm;
  const double bg_margin = 2.0 * fg_radius;

  std::vector<Vec> inputs;
  std::vector<int> labels;
  for (int c = 0; c < c_count; ++c) {
    const int n_c = rng.uniform_int(cfg.fg_per_class.lo, cfg.fg_per_class.hi);
    for (int j = 0; j < n_c; ++j) {
      Vec g = rng.normal_vec(f);
      const double norm = std::sqrt(squared_norm(g));
      if (norm > max_noise_norm) {
        const double s = max_noise_norm / norm;
        for (double& x : g) x *= s;
      }
      Vec x = centroids[static_cast<std::size_t>(c)];
      axpy(cfg.cluster_spread, g, x);
      inputs.push_back(std::move(x));
      labels.push_back(c);
    }
  }

  const int m = rng.uniform_int(cfg.bg_count.lo, cfg.bg_count.hi);
  const int m_near = static_cast<int>(std::floor(cfg.bg_overlap * m + 0.5));
  for (int j = 0; j < m_near; ++j) {
    const int c = rng.uniform_int(0, c_count - 1);
    Vec dir = rng.normal_vec(f);
    const double norm = std::sqrt(squared_norm(dir));
    if (norm < 1e-9) {
      dir.assign(f, 0.0);
      dir[0] = 1.0;
    } else {
      for (double& x : dir) x /= norm;
    }
    const double radius = rng.uniform(1.25 * fg_radius, 2.0 * fg_radius);
    Vec x = centroids[static_cast<std::size_t>(c)];
    axpy(radius, dir, x);
    inputs.push_back(std::move(x));
    labels.push_back(kBackgroundLabel);
  }
  for (int j = 0; j < m - m_near; ++j) {
    Vec x;
    bool placed = false;
    for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
      x = rng.normal_vec(f);
      placed = true;
      for (const Vec& mu : centroids) {
        if (squared_distance(x, mu) < bg_margin * bg_margin) {
          placed = false;
          break;
        }
      }
    }
    if (!placed) {
      // Deterministic far-out fallback on the first axis.
      x.assign(f, 0.0);
      x[0] = -(kInputScale + bg_margin);
    }
    inputs.push_back(std::move(x));
    labels.push_back(kBackgroundLabel);
  }

  const TeacherOutputs outs = teacher.forward(inputs);
  const Vec cls_losses = teacher_instance_cls_loss(teacher, inputs, labels);

  EpisodeBatch batch;
  batch.num_classes = c_count;
  batch.records.reserve(inputs.size());
  batch.reg_targets.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    InstanceRecord r;
    r.id = static_cast<int>(i);
    r.input_feature = inputs[i];
    r.label = labels[i];
    r.teacher_embedding = outs.embeddings[i];
    r.teacher_logits = outs.cls_logits[i];
    r.teacher_cls_loss = cls_losses[i];
    batch.records.push_back(std::move(r));
    batch.reg_targets.push_back(block_mean_target(inputs[i]));
  }
  batch.teacher_reg = outs.reg_outputs;
  return batch;
}

}  // namespace graphkd
