// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sstab/explorer.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <array>
#include <deque>
#include <random>
#include <set>

namespace sstab {

AdversaryClass AdversaryClass::oscillator(Height low, Height high) {
  AdversaryClass cls;
  cls.kind = Kind::restricted;
  cls.states = {nil_state(low), parent_state(0, high)};
  return cls;
}

std::string describe(const AdversaryClass& cls) {
  switch (cls.kind) {
    case AdversaryClass::Kind::silent: return "silent";
    case AdversaryClass::Kind::full: return "full";
    case AdversaryClass::Kind::sampled:
      return "sampled count=" + std::to_string(cls.sample_count) + " seed=" + std::to_string(cls.seed);
    case AdversaryClass::Kind::restricted: {
      std::string out = "restricted";
      for (const auto& s : cls.states) out += " [" + format_state(s) + "]";
      return out;
    }
  }
  return "?";
}

AdversaryClass parse_adversary_class(std::string_view text) {
  if (text == "silent") return AdversaryClass::silent();
  if (text == "full") return AdversaryClass::full();
  if (text.rfind("oscillator", 0) == 0) {
    // oscillator or oscillator:<low>:<high>
    Height low = 0, high = 3;
    if (text.size() > 10) {
      std::string rest(text.substr(10));
      if (std::sscanf(rest.c_str(), ":%lu:%lu", &low, &high) != 2)
        throw std::invalid_argument("expected oscillator:<low>:<high>");
    }
    return AdversaryClass::oscillator(low, high);
  }
  if (text.rfind("sampled", 0) == 0) {
    unsigned long count = 4, seed = 0;
    if (text.size() > 7) {
      std::string rest(text.substr(7));
      if (std::sscanf(rest.c_str(), ":%lu:%lu", &count, &seed) < 1)
        throw std::invalid_argument("expected sampled:<count>[:<seed>]");
    }
    return AdversaryClass::sampled(count, seed);
  }
  throw std::invalid_argument("unknown adversary class '" + std::string(text) + "'");
}

std::optional<std::uint64_t> ContainmentCertificate::worst_changes() const {
  std::uint64_t worst = 0;
  for (const auto& [v, n] : max_changes) {
    if (!n) return std::nullopt;
    worst = std::max(worst, *n);
  }
  return worst;
}

namespace {

constexpr std::size_t kMaxProcesses = 8;
constexpr std::uint64_t kMaxParentCode = 7;  // 0 = ⊥, 1..7 = channels 0..6
constexpr Height kMaxPackedHeight = 511;  // 5 low bits in config, 4 high bits in sched
constexpr std::uint32_t kMaxBound = 8;
constexpr std::size_t kMaxMetrics = 12;
constexpr std::uint32_t kInf = UINT32_MAX;
constexpr std::uint32_t kUnset = UINT32_MAX;

struct Key {
  std::uint64_t config = 0;  // 8 bits per process: parent code | low height << 3
  std::uint64_t sched = 0;   // 3 bits of age per process, streak, dirty, high height nibbles
  bool operator==(const Key&) const = default;
};

constexpr int kHighHeightShift = 28;

/// The configuration part of a key, without scheduler bookkeeping.
using ConfigWord = std::pair<std::uint64_t, std::uint64_t>;

ConfigWord config_word(const Key& k) { return {k.config, k.sched >> kHighHeightShift}; }

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    return static_cast<std::size_t>(mix64(k.config ^ mix64(k.sched)));
  }
};

struct Node {
  Configuration config;
  std::array<std::uint8_t, kMaxProcesses> ages{};
  std::uint8_t streak = 0;
  bool dirty = false;
};

constexpr int kStreakShift = 24;
constexpr int kDirtyShift = 27;

Key pack(const Node& node) {
  Key k;
  for (std::size_t v = 0; v < node.config.size(); ++v) {
    const auto& s = node.config.states[v];
    std::uint64_t code = s.parent ? static_cast<std::uint64_t>(*s.parent) + 1 : 0;
    if (code > kMaxParentCode || s.height > kMaxPackedHeight)
      throw ExplorationError("state of process " + std::to_string(v) +
                             " does not fit the explorer encoding (" + format_state(s) + ")");
    k.config |= (code | ((s.height & 31u) << 3)) << (8 * v);
    k.sched |= (s.height >> 5) << (kHighHeightShift + 4 * v);
    k.sched |= static_cast<std::uint64_t>(node.ages[v] & 7u) << (3 * v);
  }
  k.sched |= static_cast<std::uint64_t>(node.streak & 7u) << kStreakShift;
  k.sched |= static_cast<std::uint64_t>(node.dirty) << kDirtyShift;
  return k;
}

Configuration unpack_config(const ConfigWord& word, std::size_t n) {
  Configuration c;
  c.states.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    std::uint64_t byte = (word.first >> (8 * v)) & 0xff;
    std::uint64_t code = byte & 7u;
    if (code) c.states[v].parent = static_cast<Channel>(code - 1);
    c.states[v].height = (byte >> 3) | (((word.second >> (4 * v)) & 15u) << 5);
  }
  return c;
}

Node unpack(const Key& k, std::size_t n) {
  Node node;
  node.config = unpack_config(config_word(k), n);
  for (std::size_t v = 0; v < n; ++v) node.ages[v] = (k.sched >> (3 * v)) & 7u;
  node.streak = (k.sched >> kStreakShift) & 7u;
  node.dirty = (k.sched >> kDirtyShift) & 1u;
  return node;
}

struct Move {
  std::vector<ProcessId> selected;
  std::vector<ByzantineWrite> writes;
  std::vector<ProcessId> changed;
  Node target;
  bool completes_perturbation = false;
};

/// Successor enumeration: every B-fair daemon choice times every adversary
/// choice in the class.
class Expander {
 public:
  Expander(const Topology& topo, const Protocol& protocol, const AdversaryClass& cls,
           const ExplorationBudget& budget)
      : topo_(topo), protocol_(protocol), budget_(budget) {
    closure_ = budget.height_closure.value_or(kMaxPackedHeight);
    for (ProcessId b : topo.byzantine) {
      std::vector<ProcessState> options;
      auto all_states = [&] {
        std::vector<ProcessState> out;
        for (Height h = 0; h <= budget.height_cap; ++h) {
          out.push_back(nil_state(h));
          for (Channel c = 0; c < topo.degree(b); ++c) out.push_back(parent_state(c, h));
        }
        return out;
      };
      switch (cls.kind) {
        case AdversaryClass::Kind::silent: break;
        case AdversaryClass::Kind::full: options = all_states(); break;
        case AdversaryClass::Kind::restricted:
          for (const auto& s : cls.states) {
            ProcessState t = s;
            if (t.parent && *t.parent >= topo.degree(b)) t.parent.reset();
            if (t.height > budget.height_cap)
              throw ExplorationError("adversary class state exceeds the height cap");
            if (std::find(options.begin(), options.end(), t) == options.end()) options.push_back(t);
          }
          break;
        case AdversaryClass::Kind::sampled: {
          auto pool = all_states();
          std::mt19937_64 rng(cls.seed + 1000003ULL * b);
          std::shuffle(pool.begin(), pool.end(), rng);
          pool.resize(std::min(pool.size(), cls.sample_count));
          options = pool;
          break;
        }
      }
      byz_options_.push_back(std::move(options));
    }
  }

  Height max_height() const { return max_height_; }

  void expand(const Node& node, std::vector<Move>& out) const {
    out.clear();
    const auto& cfg = node.config;
    const std::uint32_t B = budget_.fairness_bound;
    std::vector<ProcessId> act;
    std::vector<ProcessState> next;
    for (ProcessId v = 0; v < topo_.process_count; ++v) {
      if (topo_.is_byzantine(v)) continue;
      if (auto ns = next_state(protocol_, local_view(cfg, topo_, v))) {
        act.push_back(v);
        next.push_back(*ns);
      }
    }
    const std::size_t k = act.size();
    std::uint32_t due = 0;
    if (B > 0)
      for (std::size_t i = 0; i < k; ++i)
        if (node.ages[act[i]] + 1u >= B) due |= 1u << i;

    std::vector<std::uint32_t> masks;
    const bool empty_ok = k == 0 || B == 0 || (due == 0 && node.streak + 1u < B);
    if (empty_ok) masks.push_back(0);
    if (budget_.daemon == DaemonMode::central) {
      for (std::size_t i = 0; i < k; ++i)
        if (due == 0 || (due >> i & 1u)) masks.push_back(1u << i);
    } else {
      for (std::uint32_t m = 1; m < (1u << k); ++m)
        if ((m & due) == due) masks.push_back(m);
    }

    // Adversary odometer: choice 0 = no write, j > 0 = option j - 1.
    const std::size_t nb = topo_.byzantine.size();
    std::vector<std::size_t> choice(nb, 0);
    std::vector<std::vector<ProcessState>> live(nb);
    for (std::size_t i = 0; i < nb; ++i)
      for (const auto& s : byz_options_[i])
        if (!(s == cfg[topo_.byzantine[i]])) live[i].push_back(s);

    while (true) {
      std::vector<ByzantineWrite> writes;
      for (std::size_t i = 0; i < nb; ++i)
        if (choice[i] > 0) writes.push_back({topo_.byzantine[i], live[i][choice[i] - 1]});
      for (std::uint32_t mask : masks) {
        if (mask == 0 && writes.empty()) continue;
        out.push_back(make_move(node, act, next, mask, writes));
      }
      std::size_t i = 0;
      while (i < nb && ++choice[i] > live[i].size()) choice[i++] = 0;
      if (i == nb) break;
    }
  }

 private:
  Move make_move(const Node& node, const std::vector<ProcessId>& act,
                 const std::vector<ProcessState>& next, std::uint32_t mask,
                 const std::vector<ByzantineWrite>& writes) const {
    const std::uint32_t B = budget_.fairness_bound;
    Move mv;
    mv.writes = writes;
    mv.target.config = node.config;
    auto& cfg = mv.target.config;
    for (std::size_t i = 0; i < act.size(); ++i) {
      if (mask >> i & 1u) {
        mv.selected.push_back(act[i]);
        cfg[act[i]] = next[i];
        max_height_ = std::max(max_height_, next[i].height);
        if (next[i].height > kMaxPackedHeight)
          throw ExplorationError("process " + std::to_string(act[i]) + " reached height " +
                                 std::to_string(next[i].height) +
                                 ", beyond the explorer encoding");
        if (next[i].height > closure_)
          throw std::logic_error("reachable-height closure violated: process " +
                                 std::to_string(act[i]) + " reached height " +
                                 std::to_string(next[i].height) + " > " + std::to_string(closure_));
      }
    }
    for (const auto& w : writes) cfg[w.process] = w.state;
    mv.changed = changed_processes(node.config, cfg);
    if (B > 0) {
      for (std::size_t i = 0; i < act.size(); ++i) {
        if (mask >> i & 1u) continue;
        ProcessId v = act[i];
        if (is_activable(protocol_, cfg, topo_, v))
          mv.target.ages[v] = static_cast<std::uint8_t>(std::min<std::uint32_t>(node.ages[v] + 1u, B - 1));
      }
      if (mask == 0 && !act.empty()) {
        if (!activable_correct(protocol_, cfg, topo_).empty())
          mv.target.streak = static_cast<std::uint8_t>(std::min<std::uint32_t>(node.streak + 1u, B - 1));
      }
    }
    mv.target.dirty = node.dirty;
    return mv;
  }

  const Topology& topo_;
  const Protocol& protocol_;
  ExplorationBudget budget_;
  Height closure_ = 0;
  mutable Height max_height_ = 0;
  std::vector<std::vector<ProcessState>> byz_options_;
};

using Weights = std::array<std::uint8_t, kMaxMetrics>;

/// Iterative Tarjan over the implicit search graph with a longest-path
/// dynamic program per metric on the condensation. A metric with a positive
/// edge inside a strongly connected component is unbounded.
class GraphSearch {
 public:
  struct Hooks {
    std::function<void(const Node&, std::vector<Move>&)> expand;
    std::function<Weights(const Node&, const Move&)> weigh;
    std::function<bool(const Node&)> terminal;
    std::function<void(const Node&)> visit;
    /// Return true to flag a settled component (cyclic, or a dead end).
    std::function<bool(const std::vector<std::uint32_t>&, bool cyclic)> bad_final;
  };

  struct Witness {
    std::vector<std::uint32_t> prefix;  // start ... entry node
    std::vector<std::uint32_t> cycle;   // entry ... entry, empty for dead ends
  };

  GraphSearch(std::size_t n, std::size_t metrics, Hooks hooks, std::size_t max_nodes,
              std::size_t max_depth)
      : n_(n), metrics_(metrics), hooks_(std::move(hooks)), max_nodes_(max_nodes),
        max_depth_(max_depth), cycle_witness_(metrics) {}

  /// Returns false when the node or depth budget is exhausted.
  bool run(const std::function<bool(Key&)>& next_start) {
    Key k;
    while (next_start(k)) {
      auto [id, fresh] = discover(k);
      start_ids_.push_back(id);
      if (!fresh && index_[id] != kUnset) continue;
      if (!dfs(id)) return false;
    }
    return true;
  }

  std::size_t size() const { return keys_.size(); }
  const std::vector<std::uint32_t>& starts() const { return start_ids_; }
  const Key& key(std::uint32_t id) const { return keys_[id]; }
  std::uint32_t comp(std::uint32_t id) const { return comp_[id]; }
  std::uint32_t dp(std::uint32_t id, std::size_t m) const { return dp_[id * metrics_ + m]; }
  std::optional<std::uint32_t> find(const Key& k) const {
    auto it = ids_.find(k);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  const std::optional<Witness>& cycle_witness(std::size_t m) const { return cycle_witness_[m]; }
  const std::optional<Witness>& cyclic_witness() const { return cyclic_witness_; }
  const std::optional<Witness>& dead_end_witness() const { return dead_end_witness_; }
  const std::optional<Witness>& bad_final_witness() const { return bad_final_witness_; }

  Node node(std::uint32_t id) const { return unpack(keys_[id], n_); }

  /// Moves out of `id`, regenerated.
  std::vector<Move> moves(std::uint32_t id) const {
    std::vector<Move> out;
    Node nd = node(id);
    if (hooks_.terminal && hooks_.terminal(nd)) return out;
    hooks_.expand(nd, out);
    return out;
  }

 private:
  struct Edge {
    std::uint32_t target;
    Weights w;
  };
  struct Frame {
    std::uint32_t id;
    std::vector<Edge> edges;
    std::size_t next = 0;
  };

  std::pair<std::uint32_t, bool> discover(const Key& k) {
    auto [it, fresh] = ids_.try_emplace(k, static_cast<std::uint32_t>(keys_.size()));
    if (fresh) {
      keys_.push_back(k);
      index_.push_back(kUnset);
      low_.push_back(kUnset);
      comp_.push_back(kUnset);
      on_stack_.push_back(false);
      dp_.resize(dp_.size() + metrics_, 0);
      if (hooks_.visit) hooks_.visit(unpack(k, n_));
    }
    return {it->second, fresh};
  }

  void open(std::uint32_t id) {
    index_[id] = low_[id] = counter_++;
    stack_.push_back(id);
    on_stack_[id] = true;
    Frame f{id, {}, 0};
    Node nd = unpack(keys_[id], n_);
    bool terminal = hooks_.terminal && hooks_.terminal(nd);
    if (!terminal) {
      hooks_.expand(nd, scratch_);
      f.edges.reserve(scratch_.size());
      for (const auto& mv : scratch_) {
        auto [tid, fresh] = discover(pack(mv.target));
        f.edges.push_back({tid, hooks_.weigh(nd, mv)});
      }
    }
    frames_.push_back(std::move(f));
    if (!terminal && frames_.back().edges.empty() && !dead_end_witness_) {
      dead_end_witness_ = Witness{path_ids(), {}};
    }
  }

  std::vector<std::uint32_t> path_ids() const {
    std::vector<std::uint32_t> out;
    for (const auto& f : frames_) out.push_back(f.id);
    return out;
  }

  bool dfs(std::uint32_t root) {
    open(root);
    while (!frames_.empty()) {
      if (keys_.size() > max_nodes_ || frames_.size() > max_depth_) return false;
      Frame& f = frames_.back();
      if (f.next < f.edges.size()) {
        std::uint32_t t = f.edges[f.next++].target;
        if (index_[t] == kUnset) {
          open(t);
        } else if (on_stack_[t]) {
          low_[f.id] = std::min(low_[f.id], index_[t]);
        }
        continue;
      }
      std::uint32_t id = f.id;
      if (low_[id] == index_[id]) {
        close_component(id);
      } else {
        held_[id] = std::move(f.edges);
      }
      frames_.pop_back();
      if (!frames_.empty()) {
        std::uint32_t parent = frames_.back().id;
        low_[parent] = std::min(low_[parent], low_[id]);
      }
    }
    return true;
  }

  const std::vector<Edge>& edges_of(std::uint32_t id) const {
    if (!frames_.empty() && frames_.back().id == id) return frames_.back().edges;
    return held_.at(id);
  }

  void close_component(std::uint32_t root) {
    std::vector<std::uint32_t> members;
    while (true) {
      std::uint32_t v = stack_.back();
      stack_.pop_back();
      on_stack_[v] = false;
      comp_[v] = comp_count_;
      members.push_back(v);
      if (v == root) break;
    }
    const std::uint32_t cid = comp_count_++;

    std::array<std::uint32_t, kMaxMetrics> best{};
    std::array<bool, kMaxMetrics> unbounded{};
    bool cyclic = false;
    std::optional<std::pair<std::uint32_t, std::uint32_t>> positive_edge[kMaxMetrics];
    std::optional<std::pair<std::uint32_t, std::uint32_t>> any_internal;
    bool any_edge = false;
    for (std::uint32_t u : members) {
      for (const auto& e : edges_of(u)) {
        any_edge = true;
        if (comp_[e.target] == cid) {
          cyclic = true;
          if (!any_internal) any_internal = {u, e.target};
          for (std::size_t m = 0; m < metrics_; ++m)
            if (e.w[m] > 0) {
              unbounded[m] = true;
              if (!positive_edge[m]) positive_edge[m] = {u, e.target};
            }
        } else {
          for (std::size_t m = 0; m < metrics_; ++m) {
            std::uint32_t d = dp_[e.target * metrics_ + m];
            std::uint32_t val = d == kInf ? kInf : d + e.w[m];
            best[m] = std::max(best[m], val);
          }
        }
      }
    }
    for (std::size_t m = 0; m < metrics_; ++m) {
      std::uint32_t val = unbounded[m] ? kInf : best[m];
      for (std::uint32_t u : members) dp_[u * metrics_ + m] = val;
      if (positive_edge[m] && !cycle_witness_[m])
        cycle_witness_[m] = lasso(root, positive_edge[m]->first, positive_edge[m]->second, cid);
    }
    if (cyclic && !cyclic_witness_)
      cyclic_witness_ = lasso(root, any_internal->first, any_internal->second, cid);
    if (hooks_.bad_final && !bad_final_witness_) {
      bool settles = cyclic || !any_edge;
      if (settles && hooks_.bad_final(members, cyclic)) {
        if (cyclic)
          bad_final_witness_ = lasso(root, any_internal->first, any_internal->second, cid);
        else
          bad_final_witness_ = Witness{path_ids(), {}};
      }
    }
    for (std::uint32_t u : members)
      if (u != root) held_.erase(u);
  }

  // Shortest path inside component `cid`, using the stored edges.
  std::vector<std::uint32_t> inner_path(std::uint32_t from, std::uint32_t to,
                                        std::uint32_t cid) const {
    absl::flat_hash_map<std::uint32_t, std::uint32_t> parent;
    std::deque<std::uint32_t> q{from};
    parent[from] = from;
    while (!q.empty()) {
      std::uint32_t x = q.front();
      q.pop_front();
      if (x == to) break;
      for (const auto& e : edges_of(x)) {
        if (comp_[e.target] != cid || parent.count(e.target)) continue;
        parent[e.target] = x;
        q.push_back(e.target);
      }
    }
    std::vector<std::uint32_t> path{to};
    while (path.back() != from) path.push_back(parent.at(path.back()));
    std::reverse(path.begin(), path.end());
    return path;
  }

  Witness lasso(std::uint32_t root, std::uint32_t u, std::uint32_t w, std::uint32_t cid) const {
    Witness wit;
    wit.prefix = path_ids();  // ends at root
    auto a = inner_path(root, u, cid);
    auto b = inner_path(w, root, cid);
    wit.cycle = a;
    wit.cycle.insert(wit.cycle.end(), b.begin(), b.end());
    return wit;
  }

  std::size_t n_;
  std::size_t metrics_;
  Hooks hooks_;
  std::size_t max_nodes_;
  std::size_t max_depth_;

  absl::flat_hash_map<Key, std::uint32_t, KeyHash> ids_;
  std::vector<Key> keys_;
  std::vector<std::uint32_t> index_, low_, comp_;
  std::vector<bool> on_stack_;
  std::vector<std::uint32_t> dp_;
  std::vector<std::uint32_t> start_ids_;

  std::vector<Frame> frames_;
  std::vector<std::uint32_t> stack_;
  absl::flat_hash_map<std::uint32_t, std::vector<Edge>> held_;
  std::vector<Move> scratch_;
  std::uint32_t counter_ = 0;
  std::uint32_t comp_count_ = 0;

  std::vector<std::optional<Witness>> cycle_witness_;
  std::optional<Witness> cyclic_witness_;
  std::optional<Witness> dead_end_witness_;
  std::optional<Witness> bad_final_witness_;
};

void check_instance(const Topology& topo, const AdversaryClass& cls,
                    const ExplorationBudget& budget) {
  if (topo.process_count > kMaxProcesses)
    throw ExplorationError("explorer supports at most 8 processes");
  for (ProcessId v = 0; v < topo.process_count; ++v)
    if (topo.degree(v) > kMaxParentCode)
      throw ExplorationError("explorer supports degree at most 7");
  if (budget.fairness_bound > kMaxBound)
    throw ExplorationError("explorer supports fairness bounds up to 8");
  if (std::max(budget.initial_height_cap, budget.height_cap) >= kMaxPackedHeight)
    throw ExplorationError("height caps too large for the explorer encoding");
  if (cls.kind == AdversaryClass::Kind::full && !topo.byzantine.empty() &&
      !budget.allow_large_full_adversary && (topo.process_count > 4 || budget.height_cap > 3))
    throw ExplorationError(
        "full adversary enumeration is limited to n <= 4 and caps <= 3; use a sampled class");
}

/// Odometer over every configuration under the caps.
class ConfigEnumerator {
 public:
  ConfigEnumerator(const Topology& topo, Height cap) : topo_(topo), cap_(cap) {
    digits_.assign(topo.process_count, 0);
  }
  bool next(Configuration& out) {
    if (done_) return false;
    out.states.resize(topo_.process_count);
    for (ProcessId v = 0; v < topo_.process_count; ++v) {
      std::size_t d = digits_[v];
      std::size_t parents = topo_.degree(v) + 1;
      auto p = d % parents;
      out.states[v].parent = p == 0 ? std::nullopt : std::optional<Channel>(p - 1);
      out.states[v].height = d / parents;
    }
    std::size_t i = 0;
    while (i < digits_.size()) {
      std::size_t radix = (topo_.degree(i) + 1) * (cap_ + 1);
      if (++digits_[i] < radix) break;
      digits_[i++] = 0;
    }
    if (i == digits_.size()) done_ = true;
    return true;
  }

 private:
  const Topology& topo_;
  Height cap_;
  std::vector<std::size_t> digits_;
  bool done_ = false;
};

ExecutionTrace witness_trace(const GraphSearch& search, const Topology& topo,
                             const Protocol& protocol, const std::vector<std::uint32_t>& ids,
                             const std::string& scheduler, const std::string& adversary) {
  Node first = search.node(ids.front());
  TraceRecorder rec(make_header(topo, protocol, scheduler, adversary), topo, protocol,
                    first.config);
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    const Key& want = search.key(ids[i + 1]);
    bool found = false;
    for (const auto& mv : search.moves(ids[i])) {
      if (pack(mv.target) == want) {
        rec.append(i, mv.selected, mv.writes, mv.target.config);
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("witness reconstruction lost the path");
  }
  return rec.seal();
}

std::vector<std::uint32_t> unroll(const GraphSearch::Witness& w, int loops) {
  std::vector<std::uint32_t> ids = w.prefix;
  for (int i = 0; i < loops && w.cycle.size() > 1; ++i)
    ids.insert(ids.end(), w.cycle.begin() + 1, w.cycle.end());
  return ids;
}

std::string scheduler_label(const ExplorationBudget& b) {
  return "kind=explorer daemon=" + std::string(to_string(b.daemon)) +
         " bound=" + std::to_string(b.fairness_bound);
}

std::string adversary_label(const AdversaryClass& cls, const ExplorationBudget& b) {
  return "class=" + describe(cls) + " cap=" + std::to_string(b.height_cap);
}

std::string coverage_label(const Topology& topo, const AdversaryClass& cls,
                           const ExplorationBudget& b, std::size_t starts, bool all_starts) {
  std::string out = all_starts ? "all " : "";
  out += std::to_string(starts) + " start configurations";
  if (all_starts) out += " (heights <= " + std::to_string(b.initial_height_cap) + ")";
  out += "; every " + std::string(to_string(b.daemon)) + " schedule";
  out += b.fairness_bound == 0 ? " (unconstrained)" : " with fairness bound " + std::to_string(b.fairness_bound);
  if (topo.byzantine.empty()) {
    out += "; no Byzantine process";
  } else {
    out += "; adversary " + describe(cls);
    if (cls.kind == AdversaryClass::Kind::sampled) out += " (incomplete: sampled writes)";
  }
  return out;
}

}  // namespace

ExplorationResult explore(const Topology& topo, const Protocol& protocol,
                          const AdversaryClass& adversary, const ExplorationBudget& budget,
                          const ExploreOptions& options) {
  check_instance(topo, adversary, budget);
  const std::size_t n = topo.process_count;
  Expander expander(topo, protocol, adversary, budget);

  std::optional<ConfigEnumerator> odometer;
  std::size_t start_pos = 0;
  std::size_t start_count = 0;
  auto reset_starts = [&] {
    start_pos = 0;
    start_count = 0;
    if (!options.starts) odometer.emplace(topo, budget.initial_height_cap);
  };
  auto next_start = [&](Key& k) {
    Node node;
    if (options.starts) {
      if (start_pos >= options.starts->size()) return false;
      node.config = (*options.starts)[start_pos++];
      check_configuration(node.config, topo);
    } else if (!odometer->next(node.config)) {
      return false;
    }
    ++start_count;
    k = pack(node);
    return true;
  };

  ExplorationResult result;
  result.max_actions.assign(n, std::nullopt);
  const std::string sched = scheduler_label(budget);
  const std::string adv = adversary_label(adversary, budget);

  // Pass 1: whole reachable graph; metrics 0..n-1 count actions per process,
  // metric n counts steps with at least one correct action.
  {
    GraphSearch::Hooks hooks;
    hooks.expand = [&](const Node& nd, std::vector<Move>& out) { expander.expand(nd, out); };
    hooks.weigh = [n](const Node&, const Move& mv) {
      Weights w{};
      for (ProcessId v : mv.selected) w[v] = 1;
      w[n] = mv.selected.empty() ? 0 : 1;
      return w;
    };
    if (options.on_visit) hooks.visit = [&](const Node& nd) { options.on_visit(nd.config); };
    GraphSearch search(n, n + 1, std::move(hooks), budget.max_configurations, budget.max_depth);
    reset_starts();
    const bool complete = search.run(next_start);
    result.states = search.size();
    result.start_configurations = start_count;
    result.max_correct_height = expander.max_height();
    result.coverage = coverage_label(topo, adversary, budget, start_count, !options.starts);
    if (!complete) {
      result.exhaustive = false;
      result.failure = "budget exhausted after " + std::to_string(search.size()) + " states";
      return result;
    }
    for (ProcessId v = 0; v < n; ++v) {
      if (topo.is_byzantine(v)) continue;
      std::uint32_t best = 0;
      for (std::uint32_t s : search.starts()) best = std::max(best, search.dp(s, v));
      if (best != kInf) result.max_actions[v] = best;
    }
    std::uint32_t longest = 0;
    for (std::uint32_t s : search.starts()) longest = std::max(longest, search.dp(s, n));
    if (longest != kInf) result.longest_execution = longest;
    if (const auto& w = search.cycle_witness(n)) {
      result.failure = "cycle of correct actions: some execution never stops acting";
      result.witness = witness_trace(search, topo, protocol, unroll(*w, 3), sched, adv);
      return result;
    }
  }

  // Pass 2: stop at the first 0-legitimate, 0-stable configuration.
  absl::flat_hash_map<ConfigWord, bool> legit_cache;
  bool stability_unknown = false;
  auto legit_stable = [&](const Configuration& cfg, const ConfigWord& word) {
    auto it = legit_cache.find(word);
    if (it != legit_cache.end()) return it->second;
    bool ok = is_c_legitimate(cfg, topo, protocol, 0);
    if (ok) {
      auto st = is_c_stable(cfg, topo, protocol, 0);
      if (st == Stability::indeterminate) stability_unknown = true;
      ok = st == Stability::stable;
    }
    legit_cache.emplace(word, ok);
    return ok;
  };
  {
    GraphSearch::Hooks hooks;
    hooks.expand = [&](const Node& nd, std::vector<Move>& out) { expander.expand(nd, out); };
    hooks.weigh = [](const Node&, const Move& mv) {
      Weights w{};
      w[0] = mv.selected.empty() ? 0 : 1;
      return w;
    };
    hooks.terminal = [&](const Node& nd) { return legit_stable(nd.config, config_word(pack(nd))); };
    GraphSearch search(n, 1, std::move(hooks), budget.max_configurations, budget.max_depth);
    reset_starts();
    if (!search.run(next_start) || stability_unknown) {
      result.exhaustive = false;
      result.failure = stability_unknown ? "stability classifier was indeterminate"
                                         : "budget exhausted in the stabilization pass";
      return result;
    }
    if (const auto& w = search.dead_end_witness()) {
      result.failure = "an execution stops in a configuration that is not legitimate and stable";
      result.witness = witness_trace(search, topo, protocol, w->prefix, sched, adv);
      return result;
    }
    if (const auto& w = search.cyclic_witness()) {
      result.failure = "an execution avoids legitimate and stable configurations forever";
      result.witness = witness_trace(search, topo, protocol, unroll(*w, 3), sched, adv);
      return result;
    }
    std::uint32_t worst = 0;
    for (std::uint32_t s : search.starts()) worst = std::max(worst, search.dp(s, 0));
    result.max_stabilization_steps = worst;
  }
  result.converged = true;
  return result;
}

std::uint64_t worst_case_actions(const Topology& topo, const Protocol& protocol, ProcessId v,
                                 const ExplorationBudget& budget,
                                 const AdversaryClass& adversary) {
  if (v >= topo.process_count || topo.is_byzantine(v))
    throw ExplorationError("worst_case_actions needs a correct process");
  auto r = explore(topo, protocol, adversary, budget);
  if (!r.exhaustive) throw ExplorationError("exploration inexhaustive: " + r.failure);
  if (!r.max_actions[v]) throw ExplorationError("unbounded actions: " + r.failure);
  return *r.max_actions[v];
}

ContainmentCertificate certify_temporal_containment(const Topology& topo, const Protocol& protocol,
                                                    const std::vector<Configuration>& starts,
                                                    const ContainmentParams& params,
                                                    const AdversaryClass& adversary,
                                                    const ExplorationBudget& budget) {
  check_instance(topo, adversary, budget);
  const std::size_t n = topo.process_count;
  const auto constrained = c_correct_set(topo, params.c);
  if (constrained.size() + 1 > kMaxMetrics) throw ExplorationError("too many processes");
  std::vector<int> slot(n, -1);
  for (std::size_t i = 0; i < constrained.size(); ++i) slot[constrained[i]] = static_cast<int>(i);
  const std::size_t perturbation_metric = constrained.size();

  ContainmentCertificate cert;
  if (topo.byzantine.size() > params.f) {
    cert.status = Verdict::fail;
    cert.reason = "more Byzantine processes than the budget f";
    return cert;
  }

  absl::flat_hash_map<ConfigWord, bool> legit_stable_cache;
  bool stability_unknown = false;
  auto legit_stable = [&](const Configuration& cfg) {
    Node tmp;
    tmp.config = cfg;
    ConfigWord word = config_word(pack(tmp));
    auto it = legit_stable_cache.find(word);
    if (it != legit_stable_cache.end()) return it->second;
    bool ok = is_c_legitimate(cfg, topo, protocol, params.c);
    if (ok) {
      auto st = is_c_stable(cfg, topo, protocol, params.c);
      if (st == Stability::indeterminate) stability_unknown = true;
      ok = st == Stability::stable;
    }
    legit_stable_cache.emplace(word, ok);
    return ok;
  };
  for (const auto& s : starts) {
    check_configuration(s, topo);
    if (!legit_stable(s))
      throw std::invalid_argument("certification start is not c-legitimate and c-stable");
  }

  Expander expander(topo, protocol, adversary, budget);
  GraphSearch::Hooks hooks;
  hooks.expand = [&](const Node& nd, std::vector<Move>& out) {
    expander.expand(nd, out);
    for (auto& mv : out) {
      bool touched = nd.dirty;
      for (ProcessId v : mv.changed)
        if (slot[v] >= 0) touched = true;
      if (legit_stable(mv.target.config)) {
        mv.completes_perturbation = touched;
        mv.target.dirty = false;
      } else {
        mv.target.dirty = touched;
      }
    }
  };
  hooks.weigh = [&](const Node&, const Move& mv) {
    Weights w{};
    for (ProcessId v : mv.changed)
      if (slot[v] >= 0) w[static_cast<std::size_t>(slot[v])] = 1;
    w[perturbation_metric] = mv.completes_perturbation ? 1 : 0;
    return w;
  };
  GraphSearch* self = nullptr;
  hooks.bad_final = [&](const std::vector<std::uint32_t>& members, bool) {
    for (std::uint32_t id : members)
      if (!is_c_legitimate(self->node(id).config, topo, protocol, params.c)) return true;
    return false;
  };
  GraphSearch search(n, constrained.size() + 1, std::move(hooks), budget.max_configurations,
                     budget.max_depth);
  self = &search;

  std::size_t pos = 0;
  const bool complete = search.run([&](Key& k) {
    if (pos >= starts.size()) return false;
    Node nd;
    nd.config = starts[pos++];
    k = pack(nd);
    return true;
  });
  cert.states = search.size();
  cert.coverage = coverage_label(topo, adversary, budget, starts.size(), false);
  if (!complete || stability_unknown) {
    cert.status = Verdict::indeterminate;
    cert.reason = stability_unknown ? "stability classifier was indeterminate"
                                    : "budget exhausted after " + std::to_string(search.size()) +
                                          " states";
    return cert;
  }

  auto worst = [&](std::size_t m) -> std::optional<std::uint64_t> {
    std::uint32_t best = 0;
    for (std::uint32_t s : search.starts()) best = std::max(best, search.dp(s, m));
    if (best == kInf) return std::nullopt;
    return best;
  };
  for (std::size_t i = 0; i < constrained.size(); ++i) cert.max_changes[constrained[i]] = worst(i);
  cert.max_perturbations = worst(perturbation_metric);

  const std::string sched = scheduler_label(budget);
  const std::string adv = adversary_label(adversary, budget);
  cert.status = Verdict::pass;
  for (std::size_t m = 0; m <= perturbation_metric; ++m) {
    if (const auto& w = search.cycle_witness(m)) {
      cert.status = Verdict::fail;
      cert.reason = m == perturbation_metric
                        ? "unbounded number of perturbations"
                        : "unbounded S-variable changes at process " + std::to_string(constrained[m]);
      cert.counterexample = witness_trace(search, topo, protocol, unroll(*w, 3), sched, adv);
      return cert;
    }
  }
  if (const auto& w = search.bad_final_witness()) {
    cert.status = Verdict::fail;
    cert.reason = "an execution settles in a configuration that is not c-legitimate";
    cert.counterexample = witness_trace(search, topo, protocol,
                                        w->cycle.empty() ? w->prefix : unroll(*w, 1), sched, adv);
    return cert;
  }

  // Finite but possibly over budget: walk the longest path for the metric.
  auto longest_path = [&](std::size_t m) {
    std::uint32_t cur = search.starts().front();
    for (std::uint32_t s : search.starts())
      if (search.dp(s, m) > search.dp(cur, m)) cur = s;
    std::vector<std::uint32_t> ids{cur};
    while (search.dp(cur, m) > 0) {
      // Breadth-first inside the component for a node whose outgoing edge
      // realizes the optimum.
      const std::uint32_t target = search.dp(cur, m);
      const std::uint32_t cid = search.comp(cur);
      absl::flat_hash_map<std::uint32_t, std::uint32_t> parent{{cur, cur}};
      std::deque<std::uint32_t> q{cur};
      std::optional<std::pair<std::uint32_t, std::uint32_t>> exit;
      while (!q.empty() && !exit) {
        std::uint32_t x = q.front();
        q.pop_front();
        Node nd = search.node(x);
        for (const auto& mv : search.moves(x)) {
          auto y = search.find(pack(mv.target));
          if (!y) continue;
          Weights w{};
          for (ProcessId v : mv.changed)
            if (slot[v] >= 0) w[static_cast<std::size_t>(slot[v])] = 1;
          w[perturbation_metric] = mv.completes_perturbation ? 1 : 0;
          if (search.comp(*y) == cid) {
            if (!parent.count(*y)) {
              parent[*y] = x;
              q.push_back(*y);
            }
          } else if (search.dp(*y, m) != kInf && search.dp(*y, m) + w[m] == target) {
            exit = {x, *y};
            break;
          }
        }
      }
      if (!exit) throw std::logic_error("longest path reconstruction failed");
      std::vector<std::uint32_t> inner{exit->first};
      while (inner.back() != cur) inner.push_back(parent.at(inner.back()));
      std::reverse(inner.begin(), inner.end());
      ids.insert(ids.end(), inner.begin() + 1, inner.end());
      ids.push_back(exit->second);
      cur = exit->second;
    }
    return ids;
  };

  if (*cert.max_perturbations > params.t) {
    cert.status = Verdict::fail;
    cert.reason = "perturbation count " + std::to_string(*cert.max_perturbations) +
                  " exceeds t=" + std::to_string(params.t);
    cert.counterexample = witness_trace(search, topo, protocol, longest_path(perturbation_metric),
                                        sched, adv);
    return cert;
  }
  for (std::size_t i = 0; i < constrained.size(); ++i) {
    if (*cert.max_changes[constrained[i]] > params.k) {
      cert.status = Verdict::fail;
      cert.reason = "process " + std::to_string(constrained[i]) + " changes S-variables " +
                    std::to_string(*cert.max_changes[constrained[i]]) + " times, k=" +
                    std::to_string(params.k);
      cert.counterexample = witness_trace(search, topo, protocol, longest_path(i), sched, adv);
      return cert;
    }
  }
  cert.reason = "certified";
  return cert;
}

std::vector<Configuration> all_configurations(const Topology& topo, Height height_cap) {
  std::vector<Configuration> out;
  ConfigEnumerator e(topo, height_cap);
  Configuration c;
  while (e.next(c)) out.push_back(c);
  return out;
}

std::vector<Configuration> legitimate_stable_configurations(const Topology& topo,
                                                            const Protocol& protocol,
                                                            Height height_cap) {
  std::vector<Configuration> out;
  ConfigEnumerator e(topo, height_cap);
  Configuration c;
  while (e.next(c))
    if (is_c_legitimate(c, topo, protocol, 0) && is_c_stable(c, topo, protocol, 0) == Stability::stable)
      out.push_back(c);
  return out;
}

}  // namespace sstab
