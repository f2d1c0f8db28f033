// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphkd/synth.hpp"
#include "graphkd/trainer.hpp"

namespace graphkd {

struct GradcheckConfig {
  double step = 1e-5;
  double tolerance = 1e-5;
};

struct OutputConfig {
  std::string dir = "out";
  bool export_graphs = false;  // after distill, dump graphs of a fixed probe episode
};

/// Fully resolved run settings. One root seed feeds every derived stream; the
/// same value is mirrored into episode.seed and train.seed.
struct RunConfig {
  std::uint64_t seed = 0;
  EpisodeConfig episode;
  TrainConfig train;
  GradcheckConfig gradcheck;
  OutputConfig output;
};

/// Documented defaults, as printed by `print-defaults`.
RunConfig default_config();

/// Parse config JSON text, then apply dotted-path overrides ("mining.T=0.5"
/// or separate key/value). Unknown keys, type mismatches, and constraint
/// violations throw ValidationError naming the key. Empty text means
/// "defaults only".
RunConfig parse_config_text(const std::string& json_text,
                            const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// As parse_config_text but reading from a file; missing or unreadable file
/// throws IoError.
RunConfig parse_config_file(const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// The resolved config as pretty JSON, key order fixed, full precision.
std::string config_to_json(const RunConfig& cfg);

}  // namespace graphkd
