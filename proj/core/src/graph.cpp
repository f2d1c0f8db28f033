// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#include "graphkd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace graphkd {

double cosine_similarity(const Vec& a, const Vec& b, double eps) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine_similarity: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  const double na = std::sqrt(squared_norm(a));
  const double nb = std::sqrt(squared_norm(b));
  if (na < eps || nb < eps) return 0.0;
  return dot(a, b) / (na * nb);
}

NodeSet split_nodes(const std::vector<InstanceRecord>& records) {
  NodeSet out;
  for (const auto& r : records) {
    if (r.is_background()) {
      out.bg_nodes.push_back(r.teacher_embedding);
      out.bg_ids.push_back(r.id);
    } else {
      out.fg_nodes.push_back(r.teacher_embedding);
      out.fg_ids.push_back(r.id);
    }
  }
  return out;
}

NodeSet split_nodes(const std::vector<InstanceRecord>& records, std::span<const Vec> embeddings) {
  if (embeddings.size() != records.size()) {
    throw std::invalid_argument("split_nodes: expected one embedding per record, got " +
                                std::to_string(embeddings.size()) + " for " +
                                std::to_string(records.size()) + " records");
  }
  NodeSet out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.is_background()) {
      out.bg_nodes.push_back(Vec(embeddings[i].begin(), embeddings[i].end()));
      out.bg_ids.push_back(r.id);
    } else {
      out.fg_nodes.push_back(Vec(embeddings[i].begin(), embeddings[i].end()));
      out.fg_ids.push_back(r.id);
    }
  }
  return out;
}

std::vector<int> mine_background(const std::vector<InstanceRecord>& records, double threshold) {
  std::vector<int> ids;
  for (const auto& r : records) {
    if (r.is_background() && r.teacher_cls_loss > threshold) ids.push_back(r.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

EdgeMatrix build_edge_matrix(const std::vector<Vec>& nodes, double eps) {
  std::vector<int> ids(nodes.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  return build_edge_matrix(nodes, std::move(ids), eps);
}

EdgeMatrix build_edge_matrix(const std::vector<Vec>& nodes, std::vector<int> node_ids, double eps) {
  if (node_ids.size() != nodes.size()) {
    throw std::invalid_argument("build_edge_matrix: ids/nodes size mismatch");
  }
  const std::size_t k = nodes.size();
  EdgeMatrix em;
  em.values = Matrix(k, k);
  em.node_ids = std::move(node_ids);
  // Norms once, then the upper triangle mirrored down. Self-similarity is
  // exactly 1 for any nonzero node; zero-norm nodes get an all-zero row.
  std::vector<double> norms(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (i > 0 && nodes[i].size() != nodes[0].size()) {
      throw std::invalid_argument("build_edge_matrix: inconsistent node dimensions");
    }
    norms[i] = std::sqrt(squared_norm(nodes[i]));
  }
  for (std::size_t p = 0; p < k; ++p) {
    em.values(p, p) = (norms[p] < eps) ? 0.0 : 1.0;
    for (std::size_t q = p + 1; q < k; ++q) {
      double s = 0.0;
      if (norms[p] >= eps && norms[q] >= eps) s = dot(nodes[p], nodes[q]) / (norms[p] * norms[q]);
      em.values(p, q) = s;
      em.values(q, p) = s;
    }
  }
  return em;
}

namespace {

// Edge participants: foreground nodes in record order, then mined background
// ids ascending (or every background node when mining is off).
Graph assemble(NodeSet nodes, const std::vector<InstanceRecord>& records, double mining_threshold,
               bool use_mining, double eps) {
  std::vector<int> bg_participants;
  if (use_mining) {
    bg_participants = mine_background(records, mining_threshold);
  } else {
    bg_participants = nodes.bg_ids;
    std::sort(bg_participants.begin(), bg_participants.end());
  }

  std::vector<Vec> participant_nodes;
  std::vector<int> participant_ids;
  participant_nodes.reserve(nodes.fg_count() + bg_participants.size());
  participant_ids.reserve(nodes.fg_count() + bg_participants.size());
  for (std::size_t i = 0; i < nodes.fg_count(); ++i) {
    participant_nodes.push_back(nodes.fg_nodes[i]);
    participant_ids.push_back(nodes.fg_ids[i]);
  }
  for (int id : bg_participants) {
    auto it = std::find(nodes.bg_ids.begin(), nodes.bg_ids.end(), id);
    if (it == nodes.bg_ids.end()) {
      throw std::invalid_argument("build_graph: mined id " + std::to_string(id) +
                                  " has no background node");
    }
    participant_nodes.push_back(nodes.bg_nodes[static_cast<std::size_t>(it - nodes.bg_ids.begin())]);
    participant_ids.push_back(id);
  }

  Graph g;
  g.edges = build_edge_matrix(participant_nodes, std::move(participant_ids), eps);
  g.nodes = std::move(nodes);
  return g;
}

}  // namespace

Graph build_graph(const std::vector<InstanceRecord>& records, double mining_threshold,
                  bool use_mining, double eps) {
  return assemble(split_nodes(records), records, mining_threshold, use_mining, eps);
}

Graph build_graph(const std::vector<InstanceRecord>& records, std::span<const Vec> embeddings,
                  double mining_threshold, bool use_mining, double eps) {
  return assemble(split_nodes(records, embeddings), records, mining_threshold, use_mining, eps);
}

}  // namespace graphkd
