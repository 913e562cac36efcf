// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sstab/simulator.hpp"

namespace sstab {

Configuration random_configuration(const Topology& topo, Height height_cap, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Configuration c;
  c.states.reserve(topo.process_count);
  std::uniform_int_distribution<Height> hd(0, height_cap);
  for (ProcessId v = 0; v < topo.process_count; ++v) {
    std::uniform_int_distribution<std::size_t> pd(0, topo.degree(v));
    std::size_t p = pd(rng);
    ProcessState s;
    if (p < topo.degree(v)) s.parent = static_cast<Channel>(p);
    s.height = hd(rng);
    c.states.push_back(s);
  }
  return c;
}

Configuration legitimate_configuration(const Topology& topo) {
  auto dist = bfs_distances(topo, {topo.root}, true);
  Configuration c;
  c.states.assign(topo.process_count, nil_state(0));
  for (ProcessId v = 0; v < topo.process_count; ++v) {
    if (v == topo.root || topo.is_byzantine(v) || dist[v] == kUnreachable) continue;
    const auto& nv = topo.neighbors[v];
    for (Channel k = 0; k < nv.size(); ++k) {
      ProcessId u = nv[k];
      if (topo.is_correct(u) && dist[u] + 1 == dist[v]) {
        c[v] = parent_state(k, dist[v]);
        break;
      }
    }
  }
  return c;
}

Simulator::Simulator(const Topology& topo, Protocol protocol, Configuration initial,
                     Scheduler scheduler, Adversary adversary, std::uint32_t snapshot_every)
    : topo_(&topo),
      protocol_(std::move(protocol)),
      scheduler_(std::move(scheduler)),
      adversary_(std::move(adversary)),
      recorder_(make_header(topo, protocol_, scheduler_.describe(), adversary_.describe(),
                            snapshot_every),
                topo, protocol_, std::move(initial)) {}

void Simulator::set_adversary(Adversary adversary) { adversary_ = std::move(adversary); }

bool Simulator::tick() {
  const Configuration& cur = recorder_.current();
  auto activable = activable_correct(protocol_, cur, *topo_);
  if (activable.empty() && adversary_.finished(cur, tick_)) return false;
  auto writes = adversary_.act(cur, tick_);
  std::vector<ProcessId> selected;
  if (!activable.empty()) selected = scheduler_.select(activable, recorder_.step_count());
  if (!selected.empty() || !writes.empty()) {
    Configuration next = apply_step(cur, *topo_, protocol_, selected, writes);
    recorder_.append(tick_, std::move(selected), std::move(writes), next);
  }
  ++tick_;
  return true;
}

StopReason Simulator::run(std::uint64_t max_steps, std::uint64_t max_ticks) {
  const std::uint64_t tick_limit = max_ticks == 0 ? UINT64_MAX : tick_ + max_ticks;
  while (true) {
    if (recorder_.step_count() >= max_steps) return StopReason::step_limit;
    if (tick_ >= tick_limit) return StopReason::tick_limit;
    if (!tick()) return StopReason::quiescent;
  }
}

StopReason Simulator::run_until_quiescent(std::uint64_t max_steps, std::uint64_t max_ticks) {
  const std::uint64_t tick_limit = max_ticks == 0 ? UINT64_MAX : tick_ + max_ticks;
  while (!activable_correct(protocol_, recorder_.current(), *topo_).empty()) {
    if (recorder_.step_count() >= max_steps) return StopReason::step_limit;
    if (tick_ >= tick_limit) return StopReason::tick_limit;
    tick();
  }
  return StopReason::quiescent;
}

ExecutionTrace Simulator::trace() const {
  ExecutionTrace t = recorder_.seal();
  t.header.adversary = adversary_.describe();
  return t;
}

}  // namespace sstab
