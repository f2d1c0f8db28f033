// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#include "graphkd/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "graphkd/errors.hpp"

namespace graphkd {

namespace {

using json = nlohmann::ordered_json;

json to_json_tree(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["episode"] = {
      {"num_classes", c.episode.num_classes},
      {"fg_per_class", {c.episode.fg_per_class.lo, c.episode.fg_per_class.hi}},
      {"bg_count", {c.episode.bg_count.lo, c.episode.bg_count.hi}},
      {"input_dim", c.episode.input_dim},
      {"embed_dim", c.episode.embed_dim},
      {"cluster_spread", c.episode.cluster_spread},
      {"bg_overlap", c.episode.bg_overlap},
  };
  j["train"] = {
      {"steps", c.train.steps},
      {"batch_episodes", c.train.batch_episodes},
      {"optimizer", c.train.optimizer == Optimizer::kAdam ? "adam" : "sgd-momentum"},
      {"learning_rate", c.train.learning_rate},
      {"momentum", c.train.momentum},
      {"adam_beta1", c.train.adam_beta1},
      {"adam_beta2", c.train.adam_beta2},
      {"adam_eps", c.train.adam_eps},
      {"student_hidden", c.train.student_hidden},
  };
  j["weights"] = {
      {"lambda1", c.train.weights.lambda1},
      {"lambda3", c.train.weights.lambda3},
      {"alpha", c.train.weights.alpha},
      {"temperature", c.train.weights.temperature},
      {"reg_match_weight", c.train.weights.reg_match_weight},
  };
  j["mining"] = {
      {"enabled", c.train.mining_enabled},
      {"T", c.train.mining_threshold},
  };
  j["edges"] = {
      {"fg_linked_only", c.train.weights.fg_linked_only},
      {"norm_epsilon", c.train.norm_epsilon},
  };
  j["ablation"] = {
      {"edge", c.train.flags.edge},
      {"fg_node", c.train.flags.fg_node},
      {"bg_node", c.train.flags.bg_node},
      {"logits", c.train.flags.logits},
  };
  j["gradcheck"] = {
      {"step", c.gradcheck.step},
      {"tolerance", c.gradcheck.tolerance},
  };
  j["output"] = {
      {"dir", c.output.dir},
      {"export_graphs", c.output.export_graphs},
  };
  return j;
}

bool type_matches(const json& schema_val, const json& v) {
  if (schema_val.is_boolean()) return v.is_boolean();
  if (schema_val.is_string()) return v.is_string();
  if (schema_val.is_number_integer() || schema_val.is_number_unsigned()) {
    return v.is_number_integer() || v.is_number_unsigned();
  }
  if (schema_val.is_number_float()) return v.is_number();
  if (schema_val.is_array()) return v.is_array();
  return false;
}

const char* type_name(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_string()) return "string";
  if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
  if (v.is_number_float()) return "number";
  if (v.is_array()) return "array";
  if (v.is_object()) return "object";
  return "null";
}

std::string join_key(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Overlay user values onto the defaults, rejecting unknown keys and values of
// the wrong shape. The defaults tree doubles as the schema.
void merge_validate(json& base, const json& user, const std::string& prefix) {
  if (!user.is_object()) {
    throw ValidationError("config: expected an object at '" +
                          (prefix.empty() ? std::string("<top level>") : prefix) + "', got " +
                          type_name(user));
  }
  for (const auto& [key, value] : user.items()) {
    const std::string path = join_key(prefix, key);
    if (!base.contains(key)) {
      throw ValidationError("config: unknown key '" + path + "'");
    }
    json& slot = base[key];
    if (slot.is_object()) {
      merge_validate(slot, value, path);
      continue;
    }
    if (!type_matches(slot, value)) {
      throw ValidationError("config: key '" + path + "' expects " + type_name(slot) + ", got " +
                            type_name(value));
    }
    slot = value;
  }
}

void apply_override(json& base, const std::string& dotted, const std::string& raw) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : dotted) {
    if (ch == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  json* slot = &base;
  std::string seen;
  for (const std::string& part : parts) {
    seen = join_key(seen, part);
    if (!slot->is_object() || !slot->contains(part)) {
      throw ValidationError("config: unknown key '" + seen + "' in override --" + dotted);
    }
    slot = &(*slot)[part];
  }
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // bare words like "adam" are strings
  }
  // A string slot takes the raw text: "--output.dir 123" means the name "123".
  if (slot->is_string() && !value.is_string()) value = raw;
  if (slot->is_object()) {
    throw ValidationError("config: override --" + dotted + " targets an object, not a value");
  }
  if (!type_matches(*slot, value)) {
    throw ValidationError("config: key '" + dotted + "' expects " + type_name(*slot) + ", got " +
                          type_name(value));
  }
  *slot = value;
}

[[noreturn]] void fail(const std::string& key, const std::string& constraint) {
  throw ValidationError("config: " + key + " " + constraint);
}

CountRange read_range(const json& arr, const std::string& key) {
  if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number_integer() ||
      !arr[1].is_number_integer()) {
    fail(key, "must be a [lo, hi] pair of integers");
  }
  CountRange r{arr[0].get<int>(), arr[1].get<int>()};
  if (r.lo < 0 || r.hi < r.lo) fail(key, "must satisfy 0 <= lo <= hi");
  return r;
}

RunConfig from_json(const json& j) {
  RunConfig c = RunConfig{};

  if (!j["seed"].is_number_unsigned() &&
      !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
    fail("seed", "must be a nonnegative integer");
  }
  c.seed = j["seed"].get<std::uint64_t>();

  const json& ep = j["episode"];
  c.episode.num_classes = ep["num_classes"].get<int>();
  if (c.episode.num_classes < 2) fail("episode.num_classes", "must be >= 2");
  c.episode.fg_per_class = read_range(ep["fg_per_class"], "episode.fg_per_class");
  c.episode.bg_count = read_range(ep["bg_count"], "episode.bg_count");
  c.episode.input_dim = ep["input_dim"].get<int>();
  if (c.episode.input_dim < 2) fail("episode.input_dim", "must be >= 2");
  c.episode.embed_dim = ep["embed_dim"].get<int>();
  if (c.episode.embed_dim < 2) fail("episode.embed_dim", "must be >= 2");
  if (c.episode.num_classes > c.episode.input_dim ||
      c.episode.num_classes > c.episode.embed_dim) {
    fail("episode.num_classes", "must not exceed input_dim or embed_dim");
  }
  c.episode.cluster_spread = ep["cluster_spread"].get<double>();
  if (!(c.episode.cluster_spread > 0.0)) fail("episode.cluster_spread", "must be > 0");
  c.episode.bg_overlap = ep["bg_overlap"].get<double>();
  if (c.episode.bg_overlap < 0.0 || c.episode.bg_overlap > 1.0) {
    fail("episode.bg_overlap", "must lie in [0, 1]");
  }
  c.episode.seed = c.seed;

  const json& tr = j["train"];
  c.train.steps = tr["steps"].get<int>();
  if (c.train.steps < 1) fail("train.steps", "must be >= 1");
  c.train.batch_episodes = tr["batch_episodes"].get<int>();
  if (c.train.batch_episodes < 1) fail("train.batch_episodes", "must be >= 1");
  const std::string opt = tr["optimizer"].get<std::string>();
  if (opt == "adam") {
    c.train.optimizer = Optimizer::kAdam;
  } else if (opt == "sgd-momentum") {
    c.train.optimizer = Optimizer::kSgdMomentum;
  } else {
    fail("train.optimizer", "must be \"adam\" or \"sgd-momentum\"");
  }
  c.train.learning_rate = tr["learning_rate"].get<double>();
  if (!(c.train.learning_rate > 0.0)) fail("train.learning_rate", "must be > 0");
  c.train.momentum = tr["momentum"].get<double>();
  if (c.train.momentum < 0.0 || c.train.momentum >= 1.0) fail("train.momentum", "must lie in [0, 1)");
  c.train.adam_beta1 = tr["adam_beta1"].get<double>();
  if (c.train.adam_beta1 < 0.0 || c.train.adam_beta1 >= 1.0) {
    fail("train.adam_beta1", "must lie in [0, 1)");
  }
  c.train.adam_beta2 = tr["adam_beta2"].get<double>();
  if (c.train.adam_beta2 < 0.0 || c.train.adam_beta2 >= 1.0) {
    fail("train.adam_beta2", "must lie in [0, 1)");
  }
  c.train.adam_eps = tr["adam_eps"].get<double>();
  if (!(c.train.adam_eps > 0.0)) fail("train.adam_eps", "must be > 0");
  c.train.student_hidden = tr["student_hidden"].get<int>();
  if (c.train.student_hidden < 1) fail("train.student_hidden", "must be >= 1");

  const json& w = j["weights"];
  c.train.weights.lambda1 = w["lambda1"].get<double>();
  if (c.train.weights.lambda1 < 0.0) fail("weights.lambda1", "must be >= 0");
  c.train.weights.lambda3 = w["lambda3"].get<double>();
  if (c.train.weights.lambda3 < 0.0) fail("weights.lambda3", "must be >= 0");
  c.train.weights.alpha = w["alpha"].get<double>();
  if (c.train.weights.alpha < 0.0) fail("weights.alpha", "must be >= 0");
  c.train.weights.temperature = w["temperature"].get<double>();
  if (!(c.train.weights.temperature > 0.0)) fail("weights.temperature", "must be > 0");
  c.train.weights.reg_match_weight = w["reg_match_weight"].get<double>();
  if (c.train.weights.reg_match_weight < 0.0) fail("weights.reg_match_weight", "must be >= 0");

  c.train.mining_enabled = j["mining"]["enabled"].get<bool>();
  c.train.mining_threshold = j["mining"]["T"].get<double>();
  if (c.train.mining_threshold < 0.0) fail("mining.T", "must be >= 0");

  c.train.weights.fg_linked_only = j["edges"]["fg_linked_only"].get<bool>();
  c.train.norm_epsilon = j["edges"]["norm_epsilon"].get<double>();
  if (!(c.train.norm_epsilon > 0.0)) fail("edges.norm_epsilon", "must be > 0");

  c.train.flags.edge = j["ablation"]["edge"].get<bool>();
  c.train.flags.fg_node = j["ablation"]["fg_node"].get<bool>();
  c.train.flags.bg_node = j["ablation"]["bg_node"].get<bool>();
  c.train.flags.logits = j["ablation"]["logits"].get<bool>();
  c.train.seed = c.seed;

  c.gradcheck.step = j["gradcheck"]["step"].get<double>();
  if (!(c.gradcheck.step > 0.0)) fail("gradcheck.step", "must be > 0");
  c.gradcheck.tolerance = j["gradcheck"]["tolerance"].get<double>();
  if (!(c.gradcheck.tolerance > 0.0)) fail("gradcheck.tolerance", "must be > 0");

  c.output.dir = j["output"]["dir"].get<std::string>();
  if (c.output.dir.empty()) fail("output.dir", "must not be empty");
  c.output.export_graphs = j["output"]["export_graphs"].get<bool>();

  return c;
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config_text(const std::string& json_text,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
  json tree = to_json_tree(default_config());
  const bool blank = std::all_of(json_text.begin(), json_text.end(),
                                 [](unsigned char ch) { return std::isspace(ch) != 0; });
  if (!blank) {
    json user;
    try {
      user = json::parse(json_text);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("config: parse error: ") + e.what());
    }
    merge_validate(tree, user, "");
  }
  for (const auto& [key, value] : overrides) apply_override(tree, key, value);
  return from_json(tree);
}

RunConfig parse_config_file(const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading config file: " + path);
  return parse_config_text(buf.str(), overrides);
}

std::string config_to_json(const RunConfig& cfg) { return to_json_tree(cfg).dump(2) + "\n"; }

}  // namespace graphkd
