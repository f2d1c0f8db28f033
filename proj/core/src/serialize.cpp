// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#include "graphkd/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "graphkd/errors.hpp"

namespace graphkd {

namespace {

using json = nlohmann::ordered_json;

std::string shortest_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

Vec vec_from_json(const json& arr, const std::string& what) {
  if (!arr.is_array()) throw ValidationError(what + ": expected an array of numbers");
  Vec v;
  v.reserve(arr.size());
  for (const auto& x : arr) {
    if (!x.is_number()) throw ValidationError(what + ": expected an array of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(what + ": parse error: " + e.what());
  }
}

const json& require(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw ValidationError(what + ": missing key '" + key + "'");
  return j.at(key);
}

}  // namespace

std::string metrics_to_json_line(const StepMetrics& m) {
  json j;
  j["step"] = m.step;
  j["supervised"] = m.supervised;
  j["node_fg"] = m.distill.node_fg;
  j["node_bg"] = m.distill.node_bg;
  j["edge"] = m.distill.edge;
  j["kld_cls"] = m.distill.kld_cls;
  j["reg_match"] = m.distill.reg_match;
  j["lambda2"] = m.distill.lambda2_used;
  j["total_distill"] = m.distill.total_distill;
  j["total"] = m.total;
  j["edge_distance"] = m.edge_distance;
  j["node_mse_fg"] = m.node_mse_fg;
  j["node_mse_bg"] = m.node_mse_bg;
  return j.dump();
}

GraphDump make_graph_dump(const Graph& g, const std::vector<InstanceRecord>& records) {
  std::unordered_map<int, int> label_by_id;
  for (const auto& r : records) label_by_id[r.id] = r.label;
  GraphDump d;
  const std::size_t n = g.nodes.fg_count() + g.nodes.bg_count();
  d.node_ids.reserve(n);
  d.labels.reserve(n);
  d.embeddings.reserve(n);
  auto append = [&](const std::vector<int>& ids, const std::vector<Vec>& nodes) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto it = label_by_id.find(ids[i]);
      if (it == label_by_id.end()) {
        throw ValidationError("graph dump: node id " + std::to_string(ids[i]) +
                              " has no matching record");
      }
      d.node_ids.push_back(ids[i]);
      d.labels.push_back(it->second);
      d.embeddings.push_back(nodes[i]);
    }
  };
  append(g.nodes.fg_ids, g.nodes.fg_nodes);
  append(g.nodes.bg_ids, g.nodes.bg_nodes);
  d.edge_node_ids = g.edges.node_ids;
  d.edge_matrix = g.edges.values;
  return d;
}

Graph graph_from_dump(const GraphDump& d) {
  if (d.node_ids.size() != d.labels.size() || d.node_ids.size() != d.embeddings.size()) {
    throw ValidationError("graph dump: node_ids, labels and embeddings must align");
  }
  Graph g;
  for (std::size_t i = 0; i < d.node_ids.size(); ++i) {
    if (d.labels[i] == kBackgroundLabel) {
      g.nodes.bg_ids.push_back(d.node_ids[i]);
      g.nodes.bg_nodes.push_back(d.embeddings[i]);
    } else {
      g.nodes.fg_ids.push_back(d.node_ids[i]);
      g.nodes.fg_nodes.push_back(d.embeddings[i]);
    }
  }
  g.edges.node_ids = d.edge_node_ids;
  g.edges.values = d.edge_matrix;
  if (g.edges.values.rows() != g.edges.values.cols() ||
      g.edges.values.rows() != g.edges.node_ids.size()) {
    throw ValidationError("graph dump: edge matrix shape does not match edge_node_ids");
  }
  return g;
}

std::string graph_dump_to_json(const GraphDump& d) {
  json j;
  j["node_ids"] = d.node_ids;
  j["labels"] = d.labels;
  json embs = json::array();
  for (const Vec& e : d.embeddings) embs.push_back(vec_to_json(e));
  j["embeddings"] = std::move(embs);
  json rows = json::array();
  for (std::size_t r = 0; r < d.edge_matrix.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < d.edge_matrix.cols(); ++c) row.push_back(d.edge_matrix(r, c));
    rows.push_back(std::move(row));
  }
  j["edge_matrix"] = std::move(rows);
  j["edge_node_ids"] = d.edge_node_ids;
  return j.dump(2) + "\n";
}

GraphDump graph_dump_from_json(const std::string& text) {
  const json j = parse_json(text, "graph dump");
  GraphDump d;
  for (const auto& v : require(j, "node_ids", "graph dump")) d.node_ids.push_back(v.get<int>());
  for (const auto& v : require(j, "labels", "graph dump")) d.labels.push_back(v.get<int>());
  for (const auto& e : require(j, "embeddings", "graph dump")) {
    d.embeddings.push_back(vec_from_json(e, "graph dump embeddings"));
  }
  for (const auto& v : require(j, "edge_node_ids", "graph dump")) {
    d.edge_node_ids.push_back(v.get<int>());
  }
  const json& rows = require(j, "edge_matrix", "graph dump");
  const std::size_t k = rows.size();
  d.edge_matrix = Matrix(k, k);
  for (std::size_t r = 0; r < k; ++r) {
    if (!rows[r].is_array() || rows[r].size() != k) {
      throw ValidationError("graph dump: edge_matrix must be square");
    }
    for (std::size_t c = 0; c < k; ++c) d.edge_matrix(r, c) = rows[r][c].get<double>();
  }
  return d;
}

std::string episode_to_jsonl(const EpisodeBatch& batch) {
  std::string out;
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    const InstanceRecord& r = batch.records[i];
    json j;
    j["id"] = r.id;
    j["label"] = r.label;
    j["input_feature"] = vec_to_json(r.input_feature);
    j["teacher_embedding"] = vec_to_json(r.teacher_embedding);
    j["teacher_logits"] = vec_to_json(r.teacher_logits);
    j["teacher_cls_loss"] = r.teacher_cls_loss;
    j["teacher_reg"] = vec_to_json(batch.teacher_reg[i]);
    j["reg_target"] = vec_to_json(batch.reg_targets[i]);
    out += j.dump();
    out += '\n';
  }
  return out;
}

EpisodeBatch episode_from_jsonl(const std::string& text) {
  EpisodeBatch batch;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string what = "episode line " + std::to_string(line_no);
    const json j = parse_json(line, what);
    InstanceRecord r;
    r.id = require(j, "id", what).get<int>();
    r.label = require(j, "label", what).get<int>();
    r.input_feature = vec_from_json(require(j, "input_feature", what), what + " input_feature");
    r.teacher_embedding =
        vec_from_json(require(j, "teacher_embedding", what), what + " teacher_embedding");
    r.teacher_logits = vec_from_json(require(j, "teacher_logits", what), what + " teacher_logits");
    r.teacher_cls_loss = require(j, "teacher_cls_loss", what).get<double>();
    if (r.teacher_cls_loss < 0.0) {
      throw ValidationError(what + ": teacher_cls_loss must be nonnegative");
    }
    if (r.teacher_logits.size() < 2) {
      throw ValidationError(what + ": teacher_logits needs at least two entries");
    }
    batch.teacher_reg.push_back(vec_from_json(require(j, "teacher_reg", what), what + " teacher_reg"));
    batch.reg_targets.push_back(vec_from_json(require(j, "reg_target", what), what + " reg_target"));
    batch.records.push_back(std::move(r));
  }
  if (batch.records.empty()) throw ValidationError("episode file holds no instances");
  batch.num_classes = static_cast<int>(batch.records.front().teacher_logits.size()) - 1;
  for (const auto& r : batch.records) {
    if (static_cast<int>(r.teacher_logits.size()) - 1 != batch.num_classes) {
      throw ValidationError("episode file: inconsistent teacher_logits widths");
    }
    if (r.label != kBackgroundLabel && (r.label < 0 || r.label >= batch.num_classes)) {
      throw ValidationError("episode file: label " + std::to_string(r.label) +
                            " out of range for " + std::to_string(batch.num_classes) + " classes");
    }
  }
  return batch;
}

std::string ablation_to_csv(const std::vector<AblationRow>& rows) {
  std::string out = "row,edg,fgn,bgn,supervised,node_mse_fg,node_mse_bg,edge_distance\n";
  for (const AblationRow& r : rows) {
    out += r.name;
    out += r.edge ? ",1" : ",0";
    out += r.fg_node ? ",1" : ",0";
    out += r.bg_node ? ",1" : ",0";
    out += "," + shortest_double(r.supervised);
    out += "," + shortest_double(r.node_mse_fg);
    out += "," + shortest_double(r.node_mse_bg);
    out += "," + shortest_double(r.edge_distance);
    out += '\n';
  }
  return out;
}

std::string gradcheck_report_to_json(const GradCheckReport& r, bool include_per_coordinate) {
  json j;
  j["passed"] = r.passed;
  j["max_rel_error"] = r.max_rel_error;
  j["tolerance"] = r.tolerance;
  j["step_size"] = r.step_size;
  j["num_coordinates"] = r.per_coordinate_errors.size();
  j["worst_coordinate"] = r.worst_coordinate;
  j["worst_analytic"] = r.worst_analytic;
  j["worst_numeric"] = r.worst_numeric;
  if (include_per_coordinate) j["per_coordinate_errors"] = vec_to_json(r.per_coordinate_errors);
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("error while writing: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading: " + path);
  return buf.str();
}

}  // namespace graphkd
