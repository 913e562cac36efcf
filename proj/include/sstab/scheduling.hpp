// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SSTAB_SCHEDULING_HPP_
#define SSTAB_SCHEDULING_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sstab/state_model.hpp"

namespace sstab {

enum class DaemonMode { central, distributed };
enum class SchedulerKind { round_robin, random_fair, adversarial_bounded };

/// Weak fairness made finite: a process that stays activable is selected
/// within `fairness_bound` consecutive steps.
struct SchedulerPolicy {
  SchedulerKind kind = SchedulerKind::random_fair;
  std::uint32_t fairness_bound = 3;
  DaemonMode daemon = DaemonMode::distributed;
  std::uint64_t seed = 0;
};

std::string_view to_string(SchedulerKind k);
std::string_view to_string(DaemonMode m);
SchedulerKind parse_scheduler_kind(std::string_view s);
DaemonMode parse_daemon_mode(std::string_view s);

/// Per-run daemon. Tracks how long each process has been continuously
/// activable without being served and forces it in once that reaches B-1.
///
/// round_robin: central picks the next activable id after the last pick;
///   distributed selects every activable process (synchronous).
/// random_fair: central picks uniformly; distributed keeps each activable
///   process with probability 1/2 (at least one).
/// adversarial_bounded: serves the process served most recently, starving
///   the others right up to the bound.
///
/// A central daemon cannot serve two overdue processes in one step; it then
/// serves the longest-waiting one, so B-fairness only holds for central
/// runs when B is at least the number of correct processes.
class Scheduler {
 public:
  Scheduler(SchedulerPolicy policy, std::size_t process_count);

  /// Nonempty subset of `activable` (ascending ids). Throws
  /// std::invalid_argument on an empty set.
  std::vector<ProcessId> select(std::span<const ProcessId> activable, std::uint64_t step);

  const SchedulerPolicy& policy() const { return policy_; }
  std::string describe() const;

  /// Steps each process has been continuously activable and unserved.
  const std::vector<std::uint32_t>& ages() const { return ages_; }

 private:
  SchedulerPolicy policy_;
  std::vector<std::uint32_t> ages_;
  std::optional<ProcessId> last_picked_;
  std::mt19937_64 rng_;
};

enum class AdversaryKind { silent, random_writes, oscillator, root_impersonator, replay };

std::string_view to_string(AdversaryKind k);
AdversaryKind parse_adversary_kind(std::string_view s);

struct ScriptedWrite {
  std::uint64_t tick = 0;
  ByzantineWrite write;
};

struct AdversaryStrategy {
  AdversaryKind kind = AdversaryKind::silent;
  /// Ticks between oscillator flips; random_writes writes with
  /// probability 1/period per Byzantine per tick.
  std::uint64_t period = 1;
  Height low = 0;
  std::optional<Height> high;        // oscillator, default: height cap
  std::uint64_t periods = 0;         // oscillator full cycles, 0 = unbounded
  std::uint64_t start = 0;           // first tick the adversary acts
  std::optional<Height> height_cap;  // default 2n
  std::vector<ProcessId> targets;    // empty = every Byzantine process
  std::vector<ScriptedWrite> script; // replay
  std::uint64_t seed = 0;
};

/// Byzantine behavior for one run. Only ever writes Byzantine processes and
/// never exceeds the height cap. A write is issued only when it changes the
/// target's state.
class Adversary {
 public:
  Adversary(AdversaryStrategy strategy, const Topology& topo);

  std::vector<ByzantineWrite> act(const Configuration& config, std::uint64_t tick);

  /// True once the adversary will never write again from `config` onward
  /// (as long as nobody else changes Byzantine states, which nobody does).
  bool finished(const Configuration& config, std::uint64_t tick) const;

  Height height_cap() const { return cap_; }
  const AdversaryStrategy& strategy() const { return strategy_; }
  std::string describe() const;

 private:
  std::optional<ByzantineWrite> write_if_changed(const Configuration& config, ProcessId b,
                                                 ProcessState s) const;

  AdversaryStrategy strategy_;
  const Topology* topo_;
  Height cap_;
  std::mt19937_64 rng_;
};

/// Default adversary height cap: 2n.
Height default_height_cap(const Topology& topo);

}  // namespace sstab

#endif  // SSTAB_SCHEDULING_HPP_
