// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "graphkd/matrix.hpp"

namespace graphkd {

/// Label value marking a background instance. Foreground labels are class ids
/// in [0, C). The background logit of a (C+1)-way head is index C.
inline constexpr int kBackgroundLabel = -1;

/// Norms below this are treated as zero when forming cosine similarities and
/// their gradients, so degenerate features yield 0 edges instead of NaN.
inline constexpr double kNormEpsilon = 1e-12;

/// One proposal: its pooled input feature, its label, and the frozen teacher's
/// view of it (embedding, classification logits, per-instance classification
/// loss in nats). Instances are paired between teacher and student by id.
struct InstanceRecord {
  int id = 0;
  Vec input_feature;                 // dim F
  int label = kBackgroundLabel;      // class id in [0, C) or kBackgroundLabel
  Vec teacher_embedding;             // dim D
  Vec teacher_logits;                // dim C+1, background logit last
  double teacher_cls_loss = 0.0;     // >= 0

  bool is_background() const { return label == kBackgroundLabel; }
};

/// Node features split into foreground and background groups, with the
/// originating instance ids kept alongside in matching order.
struct NodeSet {
  std::vector<Vec> fg_nodes;
  std::vector<Vec> bg_nodes;
  std::vector<int> fg_ids;
  std::vector<int> bg_ids;

  std::size_t fg_count() const { return fg_nodes.size(); }
  std::size_t bg_count() const { return bg_nodes.size(); }
};

/// Symmetric cosine-similarity matrix over a node subset. Entries lie in
/// [-1, 1]; the diagonal is 1 except for zero-norm nodes, whose edges
/// (including the self edge) are 0 by convention.
struct EdgeMatrix {
  Matrix values;              // k x k
  std::vector<int> node_ids;  // length k

  std::size_t size() const { return node_ids.size(); }
};

/// The structured instance graph: all nodes, plus edges over the participant
/// subset (every foreground node, and the mined background nodes when mining
/// is enabled).
struct Graph {
  NodeSet nodes;
  EdgeMatrix edges;
};

/// a.b / (|a||b|). Zero-norm input (norm < eps) gives 0.
/// Throws std::invalid_argument on dimension mismatch.
double cosine_similarity(const Vec& a, const Vec& b, double eps = kNormEpsilon);

/// Partition records into foreground and background nodes, teacher embeddings
/// attached, record order preserved within each group.
NodeSet split_nodes(const std::vector<InstanceRecord>& records);

/// As split_nodes, but with caller-provided embeddings (one per record, same
/// order) in place of the stored teacher embeddings. Used for the student's
/// graph: identical ids and split, student features.
NodeSet split_nodes(const std::vector<InstanceRecord>& records, std::span<const Vec> embeddings);

/// Ids of background records whose teacher classification loss is strictly
/// greater than `threshold`, ascending. Confidently-background samples stay
/// out; with a threshold above every loss the result is empty and the edge
/// set degenerates to the foreground-only prototype.
std::vector<int> mine_background(const std::vector<InstanceRecord>& records, double threshold);

/// k x k cosine-similarity matrix over `nodes`. node_ids defaults to 0..k-1.
/// Throws std::invalid_argument if node dimensions are inconsistent.
EdgeMatrix build_edge_matrix(const std::vector<Vec>& nodes, double eps = kNormEpsilon);
EdgeMatrix build_edge_matrix(const std::vector<Vec>& nodes, std::vector<int> node_ids,
                             double eps = kNormEpsilon);

/// Assemble the graph from records: split nodes, pick edge participants
/// (foreground in record order, then mined background ids ascending when
/// `use_mining`), and build the edge matrix over them.
Graph build_graph(const std::vector<InstanceRecord>& records, double mining_threshold,
                  bool use_mining, double eps = kNormEpsilon);

/// Student-side variant: same records (ids, labels, teacher losses drive the
/// mining), caller-provided embeddings.
Graph build_graph(const std::vector<InstanceRecord>& records, std::span<const Vec> embeddings,
                  double mining_threshold, bool use_mining, double eps = kNormEpsilon);

}  // namespace graphkd
