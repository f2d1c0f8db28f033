// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace graphkd {

/// Command-line entry point (subcommands: distill, ablate, gradcheck,
/// export-graph, print-defaults). Returns a process exit status: 0 success,
/// 1 validation failure, 2 numerical failure, 3 I/O failure.
int cli_main(int argc, const char* const* argv);

}  // namespace graphkd
