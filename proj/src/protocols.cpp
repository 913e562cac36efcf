// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sstab/protocols.hpp"

#include <algorithm>
#include <limits>

namespace sstab {

namespace {

Height height_above(Height h) {
  if (h == std::numeric_limits<Height>::max()) throw ModelError("height overflow");
  return h + 1;
}

}  // namespace

Channel next_parent(std::optional<Channel> current, std::size_t degree) {
  if (degree == 0) throw ModelError("next_parent on a process without neighbors");
  if (!current || *current >= degree) return 0;
  return static_cast<Channel>((*current + 1) % degree);
}

bool cafs_root_guard(const Neighborhood& view) {
  return view.is_root && (view.state.parent.has_value() || view.state.height != 0);
}

bool cafs_nonroot_guard(const Neighborhood& view) {
  if (view.is_root) return false;
  if (!view.parent_valid()) return true;
  return view.state.height != view.parent().height + 1;
}

ProcessState cafs_root_action(const Neighborhood&) { return nil_state(0); }

ProcessState cafs_nonroot_action(const Neighborhood& view) {
  Channel p = next_parent(view.state.parent, view.degree());
  return parent_state(p, height_above(view.neighbors[p].height));
}

std::optional<ProcessState> cafs_rules(const Neighborhood& view, bool is_root) {
  Neighborhood v = view;
  v.is_root = is_root;
  if (cafs_root_guard(v)) return cafs_root_action(v);
  if (cafs_nonroot_guard(v)) return cafs_nonroot_action(v);
  return std::nullopt;
}

bool cafs_spec(const LocalView& view, bool is_root) {
  if (is_root) return !view.state.parent && view.state.height == 0;
  if (!view.parent_valid()) return false;
  if (!view.neighbor_correct.at(*view.state.parent)) return true;
  return view.state.height == view.parent().height + 1;
}

Protocol cafs_protocol() {
  Protocol p;
  p.id = "cafs";
  p.rules.push_back({"root", cafs_root_guard, cafs_root_action});
  p.rules.push_back({"non-root", cafs_nonroot_guard, cafs_nonroot_action});
  p.spec = [](const LocalView& v) { return cafs_spec(v, v.is_root); };
  p.actions_change_s_variables = true;
  return p;
}

namespace {

// Lowest channel carrying the minimum neighbor height.
Channel min_height_channel(const Neighborhood& view) {
  Channel best = 0;
  for (Channel c = 1; c < view.degree(); ++c)
    if (view.neighbors[c].height < view.neighbors[best].height) best = c;
  return best;
}

bool greedy_nonroot_guard(const Neighborhood& view) {
  if (view.is_root || view.degree() == 0) return false;
  if (!view.parent_valid()) return true;
  Height min_h = view.neighbors[min_height_channel(view)].height;
  return view.parent().height != min_h || view.state.height != min_h + 1;
}

ProcessState greedy_nonroot_action(const Neighborhood& view) {
  Channel c = min_height_channel(view);
  return parent_state(c, height_above(view.neighbors[c].height));
}

}  // namespace

std::optional<ProcessState> greedy_rules(const Neighborhood& view, bool is_root) {
  Neighborhood v = view;
  v.is_root = is_root;
  if (cafs_root_guard(v)) return cafs_root_action(v);
  if (greedy_nonroot_guard(v)) return greedy_nonroot_action(v);
  return std::nullopt;
}

Protocol greedy_protocol() {
  Protocol p;
  p.id = "greedy";
  p.rules.push_back({"root", cafs_root_guard, cafs_root_action});
  p.rules.push_back({"min-height", greedy_nonroot_guard, greedy_nonroot_action});
  // Same output predicate as the tree protocol; only the repair rule differs.
  p.spec = [](const LocalView& v) { return cafs_spec(v, v.is_root); };
  p.actions_change_s_variables = true;
  return p;
}

Protocol make_protocol(std::string_view id) {
  if (id == "cafs") return cafs_protocol();
  if (id == "greedy") return greedy_protocol();
  throw std::invalid_argument("unknown protocol '" + std::string(id) + "'");
}

}  // namespace sstab
