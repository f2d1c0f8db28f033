// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "graphkd/gradients.hpp"
#include "graphkd/graph.hpp"
#include "graphkd/synth.hpp"
#include "graphkd/trainer.hpp"

namespace graphkd {

/// All numeric serialization in this module writes doubles in shortest
/// round-trip decimal form, so re-importing an artifact restores the exact
/// bits and identical runs produce byte-identical files.

/// One compact JSON object per training step, fixed key order.
std::string metrics_to_json_line(const StepMetrics& m);

/// A serialized graph: every node (id, label, embedding, in node-set order,
/// foreground first) plus the edge matrix over the participant subset.
/// edge_node_ids records which nodes the matrix rows refer to.
struct GraphDump {
  std::vector<int> node_ids;
  std::vector<int> labels;
  std::vector<Vec> embeddings;
  std::vector<int> edge_node_ids;
  Matrix edge_matrix;
};

/// Pair a graph with its records to recover per-node labels.
GraphDump make_graph_dump(const Graph& g, const std::vector<InstanceRecord>& records);

/// Rebuild a Graph (fg/bg split by label, edges reattached) from a dump.
Graph graph_from_dump(const GraphDump& d);

std::string graph_dump_to_json(const GraphDump& d);
GraphDump graph_dump_from_json(const std::string& text);

/// One instance per line: id, label, input feature, and the teacher's view
/// (embedding, logits, per-instance classification loss, regression output),
/// plus the supervised regression target, so a batch replays exactly.
std::string episode_to_jsonl(const EpisodeBatch& batch);
EpisodeBatch episode_from_jsonl(const std::string& text);

/// Fixed header row,edg,fgn,bgn,supervised,node_mse_fg,node_mse_bg,edge_distance.
std::string ablation_to_csv(const std::vector<AblationRow>& rows);

std::string gradcheck_report_to_json(const GradCheckReport& r,
                                     bool include_per_coordinate = true);

/// Whole-file helpers; failures throw IoError naming the path.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace graphkd
