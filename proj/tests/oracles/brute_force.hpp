// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

// Reference enumerator used to cross-check the explorer. It re-implements the
// tree rules on plain integers and walks every fair schedule recursively,
// sharing no code with the library beyond the adjacency lists it is given.

#ifndef SSTAB_TESTS_ORACLES_BRUTE_FORCE_HPP_
#define SSTAB_TESTS_ORACLES_BRUTE_FORCE_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

struct Instance {
  std::vector<std::vector<int>> adj;  // port order
  int root = 0;
  std::vector<bool> byz;
};

struct State {
  std::vector<int> parent;  // -1 = no parent
  std::vector<int> height;
  bool operator<(const State& o) const {
    return std::tie(parent, height) < std::tie(o.parent, o.height);
  }
};

/// New (parent, height) of v, if v may move.
inline std::optional<std::pair<int, int>> move(const Instance& g, const State& s, int v) {
  if (v == g.root) {
    if (s.parent[v] != -1 || s.height[v] != 0) return std::make_pair(-1, 0);
    return std::nullopt;
  }
  const int deg = static_cast<int>(g.adj[v].size());
  const int p = s.parent[v];
  const bool valid = p >= 0 && p < deg;
  if (valid && s.height[v] == s.height[g.adj[v][p]] + 1) return std::nullopt;
  const int np = valid ? (p + 1) % deg : 0;
  return std::make_pair(np, s.height[g.adj[v][np]] + 1);
}

/// Local correctness of v: root is (-1, 0); others have a real parent and,
/// when that parent is correct, one more than its height.
inline bool good(const Instance& g, const State& s, int v) {
  if (v == g.root) return s.parent[v] == -1 && s.height[v] == 0;
  const int deg = static_cast<int>(g.adj[v].size());
  const int p = s.parent[v];
  if (p < 0 || p >= deg) return false;
  const int u = g.adj[v][p];
  return g.byz[u] || s.height[v] == s.height[u] + 1;
}

struct Worst {
  std::vector<std::uint64_t> actions;  // per process
  std::uint64_t steps = 0;             // steps with a correct action
  bool all_terminals_good = true;
};

/// Every schedule in which a process that has waited B - 1 steps while
/// movable must move now. A central daemon facing several such processes
/// moves any one of them. Byzantine processes never change.
class Enumerator {
 public:
  Enumerator(Instance g, int bound, bool central) : g_(std::move(g)), B_(bound), central_(central) {}

  Worst solve(const State& s) { return visit(s, std::vector<int>(g_.adj.size(), 0), 0); }

 private:
  using Key = std::pair<State, std::vector<int>>;

  Worst visit(const State& s, const std::vector<int>& waits, int depth) {
    if (depth > 10000) throw std::runtime_error("oracle: execution too long");
    Key key{s, waits};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const int n = static_cast<int>(g_.adj.size());
    std::vector<int> movers;
    std::vector<std::pair<int, int>> targets;
    for (int v = 0; v < n; ++v) {
      if (g_.byz[v]) continue;
      if (auto m = move(g_, s, v)) {
        movers.push_back(v);
        targets.push_back(*m);
      }
    }
    Worst best;
    best.actions.assign(n, 0);
    if (movers.empty()) {
      for (int v = 0; v < n; ++v)
        if (!g_.byz[v] && !good(g_, s, v)) best.all_terminals_good = false;
      memo_.emplace(key, best);
      return best;
    }
    const int k = static_cast<int>(movers.size());
    int overdue = 0;
    for (int i = 0; i < k; ++i)
      if (waits[movers[i]] >= B_ - 1) overdue |= 1 << i;
    for (int mask = 1; mask < (1 << k); ++mask) {
      if (central_) {
        if (mask & (mask - 1)) continue;
        if (overdue && !(mask & overdue)) continue;
      } else if ((mask & overdue) != overdue) {
        continue;
      }
      State t = s;
      for (int i = 0; i < k; ++i)
        if (mask >> i & 1) {
          t.parent[movers[i]] = targets[i].first;
          t.height[movers[i]] = targets[i].second;
        }
      std::vector<int> w(n, 0);
      for (int i = 0; i < k; ++i)
        if (!(mask >> i & 1) && move(g_, t, movers[i])) w[movers[i]] = std::min(waits[movers[i]] + 1, B_ - 1);
      Worst sub = visit(t, w, depth + 1);
      for (int i = 0; i < k; ++i)
        if (mask >> i & 1) ++sub.actions[movers[i]];
      ++sub.steps;
      for (int v = 0; v < n; ++v) best.actions[v] = std::max(best.actions[v], sub.actions[v]);
      best.steps = std::max(best.steps, sub.steps);
      best.all_terminals_good = best.all_terminals_good && sub.all_terminals_good;
    }
    memo_.emplace(key, best);
    return best;
  }

  Instance g_;
  int B_;
  bool central_;
  std::map<Key, Worst> memo_;
};

/// Worst case over every start with parents in {-1} ∪ ports and heights
/// in [0, cap], Byzantine processes included (they then stay frozen).
inline Worst worst_over_all_starts(const Instance& g, int cap, int bound, bool central = false) {
  const int n = static_cast<int>(g.adj.size());
  Enumerator e(g, bound, central);
  Worst total;
  total.actions.assign(n, 0);
  std::vector<int> digit(n, 0);
  while (true) {
    State s;
    s.parent.resize(n);
    s.height.resize(n);
    for (int v = 0; v < n; ++v) {
      const int opts = static_cast<int>(g.adj[v].size()) + 1;
      s.parent[v] = digit[v] % opts - 1;
      s.height[v] = digit[v] / opts;
    }
    Worst w = e.solve(s);
    for (int v = 0; v < n; ++v) total.actions[v] = std::max(total.actions[v], w.actions[v]);
    total.steps = std::max(total.steps, w.steps);
    total.all_terminals_good = total.all_terminals_good && w.all_terminals_good;
    int i = 0;
    while (i < n) {
      const int radix = (static_cast<int>(g.adj[i].size()) + 1) * (cap + 1);
      if (++digit[i] < radix) break;
      digit[i++] = 0;
    }
    if (i == n) break;
  }
  return total;
}

}  // namespace oracle

#endif  // SSTAB_TESTS_ORACLES_BRUTE_FORCE_HPP_
