// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SSTAB_SIMULATOR_HPP_
#define SSTAB_SIMULATOR_HPP_

#include <cstdint>
#include <optional>
#include <random>

#include "sstab/scheduling.hpp"
#include "sstab/trace_store.hpp"

namespace sstab {

/// Arbitrary initial configuration: parents uniform over {⊥} ∪ channels,
/// heights uniform in [0, height_cap]. Byzantine processes included.
Configuration random_configuration(const Topology& topo, Height height_cap, std::uint64_t seed);

/// A legitimate, quiescent configuration for the tree protocols: a BFS tree
/// of the correct subgraph rooted at the root. Byzantine processes hold (⊥, 0).
Configuration legitimate_configuration(const Topology& topo);

enum class StopReason { quiescent, step_limit, tick_limit };

/// Drives one run: each tick the adversary proposes writes, the scheduler
/// picks among activable correct processes, and the composite step is
/// recorded. Ticks where nothing is activable and the adversary stays quiet
/// are idle and leave no trace step.
class Simulator {
 public:
  Simulator(const Topology& topo, Protocol protocol, Configuration initial, Scheduler scheduler,
            Adversary adversary, std::uint32_t snapshot_every = 32);
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Executes one tick. Returns false without doing anything once the run
  /// is quiescent and the adversary is finished.
  bool tick();

  /// Runs until quiescent-and-finished, or until `max_steps` recorded steps
  /// or `max_ticks` ticks have elapsed (0 = no tick limit).
  StopReason run(std::uint64_t max_steps, std::uint64_t max_ticks = 0);

  /// Runs until no correct process is activable, ignoring whether the
  /// adversary could still act.
  StopReason run_until_quiescent(std::uint64_t max_steps, std::uint64_t max_ticks = 0);

  void set_adversary(Adversary adversary);

  const Configuration& config() const { return recorder_.current(); }
  std::uint64_t current_tick() const { return tick_; }
  std::size_t step_count() const { return recorder_.step_count(); }
  const Protocol& protocol() const { return protocol_; }
  const Scheduler& scheduler() const { return scheduler_; }
  const Adversary& adversary() const { return adversary_; }

  ExecutionTrace trace() const;

 private:
  const Topology* topo_;
  Protocol protocol_;
  Scheduler scheduler_;
  Adversary adversary_;
  TraceRecorder recorder_;
  std::uint64_t tick_ = 0;
};

}  // namespace sstab

#endif  // SSTAB_SIMULATOR_HPP_
