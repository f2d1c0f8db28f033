// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "graphkd/graph.hpp"
#include "graphkd/rng.hpp"

namespace testutil {

using graphkd::InstanceRecord;
using graphkd::Rng;
using graphkd::Vec;

inline Vec random_vec(Rng& rng, int dim, double lo = -2.0, double hi = 2.0) {
  Vec v(static_cast<std::size_t>(dim));
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

// Random records with plausible teacher fields. A slice of nodes is zeroed
// now and then so degenerate-norm paths get exercised.
inline std::vector<InstanceRecord> random_records(Rng& rng, int n_fg, int n_bg, int embed_dim,
                                                  int num_classes, double zero_prob = 0.05) {
  std::vector<InstanceRecord> records;
  records.reserve(static_cast<std::size_t>(n_fg + n_bg));
  for (int i = 0; i < n_fg + n_bg; ++i) {
    InstanceRecord r;
    r.id = i;
    r.label = i < n_fg ? rng.uniform_int(0, num_classes - 1) : graphkd::kBackgroundLabel;
    r.input_feature = random_vec(rng, embed_dim);
    r.teacher_embedding = rng.uniform() < zero_prob ? Vec(static_cast<std::size_t>(embed_dim), 0.0)
                                                    : random_vec(rng, embed_dim);
    r.teacher_logits = random_vec(rng, num_classes + 1, -4.0, 4.0);
    r.teacher_cls_loss = rng.uniform(0.0, 2.0);
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<Vec> random_embeddings(Rng& rng, std::size_t count, int dim,
                                          double zero_prob = 0.05) {
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(rng.uniform() < zero_prob ? Vec(static_cast<std::size_t>(dim), 0.0)
                                            : random_vec(rng, dim));
  }
  return out;
}

}  // namespace testutil
