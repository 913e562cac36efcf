// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SSTAB_PROTOCOLS_HPP_
#define SSTAB_PROTOCOLS_HPP_

#include <optional>
#include <string_view>

#include "sstab/state_model.hpp"

namespace sstab {

/// Cyclic successor on channel numbers: (current + 1) mod degree. ⊥ and
/// out-of-range stored channels map to channel 0. Throws ModelError for a
/// process without neighbors.
Channel next_parent(std::optional<Channel> current, std::size_t degree);

// Strongly stabilizing spanning tree construction.
//
// Root:     (P ≠ ⊥ ∨ H ≠ 0)                 -> H := 0; P := ⊥
// Non-root: (P ∉ N ∨ H ≠ H_P + 1)           -> P := next_parent(P); H := H_P + 1
//
// The non-root action reads the new parent's height from the pre-step
// snapshot. A faulty process is never "repaired" toward a better neighbor,
// only moved to the next channel, which is what bounds Byzantine influence.
bool cafs_root_guard(const Neighborhood& view);
bool cafs_nonroot_guard(const Neighborhood& view);
ProcessState cafs_root_action(const Neighborhood& view);
ProcessState cafs_nonroot_action(const Neighborhood& view);

std::optional<ProcessState> cafs_rules(const Neighborhood& view, bool is_root);

/// Local specification: root holds (⊥, 0); a non-root has a valid parent
/// and, when that parent is correct, a height one above it.
bool cafs_spec(const LocalView& view, bool is_root);

Protocol cafs_protocol();

/// Min-height re-parenting, lowest channel on ties. Exists to show how a
/// "best neighbor" rule lets a Byzantine process disturb correct processes
/// for as long as it keeps oscillating.
std::optional<ProcessState> greedy_rules(const Neighborhood& view, bool is_root);

Protocol greedy_protocol();

/// "cafs" or "greedy". Throws std::invalid_argument otherwise.
Protocol make_protocol(std::string_view id);

}  // namespace sstab

#endif  // SSTAB_PROTOCOLS_HPP_
