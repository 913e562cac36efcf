// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SSTAB_TESTS_SUPPORT_PROPERTIES_HPP_
#define SSTAB_TESTS_SUPPORT_PROPERTIES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sstab/trace_store.hpp"

namespace props {

struct Outcome {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  std::string first_failure;
  bool ok() const { return cases > 0 && failures == 0; }
};

/// Selected processes applied in any order give the same configuration.
Outcome order_independence(std::uint64_t cases, std::uint64_t seed);

/// next_parent visits every channel once per Δ applications, Δ = 1..max_degree.
Outcome next_parent_cyclicity(std::uint32_t max_degree);

/// Quiescent configurations reached from random starts form sound trees:
/// heights strictly decrease along correct parent chains, which end at the
/// root or at a Byzantine process.
Outcome tree_soundness(std::uint64_t cases, std::uint64_t seed);

/// For views whose parent is a correct neighbor, the tree guard fires exactly
/// when the local specification fails. Exhaustive over the given bounds.
Outcome guard_spec_biconditional(std::uint32_t max_degree, sstab::Height max_height);

struct RecordedTrace {
  sstab::ExecutionTrace trace;
  sstab::Topology topology;
  std::string protocol;
};

/// Text round trip and replay re-recording reproduce every trace exactly.
Outcome replay_bit_identity(const std::vector<RecordedTrace>& traces);

}  // namespace props

#endif  // SSTAB_TESTS_SUPPORT_PROPERTIES_HPP_
