// Copyright 2026 The graphkd Authors
// SPDX-License-Identifier: Apache-2.0
#include "graphkd/commands.hpp"

int main(int argc, char** argv) { return graphkd::cli_main(argc, argv); }
