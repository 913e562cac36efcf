// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SSTAB_CLI_HPP_
#define SSTAB_CLI_HPP_

#include <ostream>

namespace sstab {

inline constexpr int kExitUsage = 64;
inline constexpr int kExitTopology = 65;

/// Entry point of the `sstab` tool. Subcommands: run, explore, demo-greedy,
/// report. Returns 0 (pass), 2 (fail), 3 (indeterminate), 64 (bad flags) or
/// 65 (invalid topology).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sstab

#endif  // SSTAB_CLI_HPP_
