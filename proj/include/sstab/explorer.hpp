// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SSTAB_EXPLORER_HPP_
#define SSTAB_EXPLORER_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sstab/analysis.hpp"
#include "sstab/scheduling.hpp"
#include "sstab/trace_store.hpp"

namespace sstab {

/// Which Byzantine behaviors the explorer quantifies over. At every step each
/// Byzantine process may stay put or move to any state of its class.
struct AdversaryClass {
  enum class Kind {
    silent,      // Byzantine states frozen at their initial values
    full,        // every (parent, height) with height <= cap
    restricted,  // the listed states only, for every Byzantine process
    sampled,     // `sample_count` seeded picks from the full set, per process
  };
  Kind kind = Kind::silent;
  std::vector<ProcessState> states;
  std::size_t sample_count = 4;
  std::uint64_t seed = 0;

  static AdversaryClass silent() { return {}; }
  static AdversaryClass full() { return {Kind::full, {}, 0, 0}; }
  /// The two states an oscillating Byzantine process alternates between.
  static AdversaryClass oscillator(Height low, Height high);
  static AdversaryClass sampled(std::size_t count, std::uint64_t seed) {
    return {Kind::sampled, {}, count, seed};
  }
};

std::string describe(const AdversaryClass& cls);
AdversaryClass parse_adversary_class(std::string_view text);

struct ExplorationBudget {
  Height height_cap = 3;          // Byzantine writes
  Height initial_height_cap = 3;  // enumerated initial heights
  /// B; 0 explores every schedule, fair or not (a sound over-approximation
  /// for action bounds, useless for convergence under a toggling adversary).
  std::uint32_t fairness_bound = 3;
  DaemonMode daemon = DaemonMode::distributed;
  std::size_t max_configurations = 4'000'000;
  std::size_t max_depth = 2'000'000;
  /// When set, every height written by a correct process must stay within
  /// this bound (std::logic_error otherwise). Unset, the only limit is the
  /// packed encoding (heights <= 511, ExplorationError beyond).
  std::optional<Height> height_closure;
  /// Lifts the default n <= 4, cap <= 3 restriction on the full class.
  bool allow_large_full_adversary = false;
};

class ExplorationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExploreOptions {
  /// Explicit start configurations; default is every configuration with
  /// parents in {⊥} ∪ channels and heights <= initial_height_cap.
  std::optional<std::vector<Configuration>> starts;
  /// Called once per discovered search node (configurations repeat across
  /// scheduler bookkeeping variants).
  std::function<void(const Configuration&)> on_visit;
};

struct ExplorationResult {
  bool exhaustive = true;
  bool converged = false;
  std::string failure;  // empty when converged
  /// Exact maximum number of rule executions per process over all explored
  /// executions; nullopt for Byzantine processes or when unbounded.
  std::vector<std::optional<std::uint64_t>> max_actions;
  /// Maximum number of steps with a correct action in one execution.
  std::optional<std::uint64_t> longest_execution;
  /// Maximum number of such steps before the first legitimate and stable
  /// configuration.
  std::optional<std::uint64_t> max_stabilization_steps;
  /// Largest height any correct process wrote in the explored executions.
  Height max_correct_height = 0;
  std::size_t states = 0;
  std::size_t start_configurations = 0;
  std::string coverage;
  std::optional<ExecutionTrace> witness;
};

/// Exhaustive search over (configuration, fairness ages) with memoization.
/// Convergence means: no cycle of the search graph contains a correct
/// action, and every execution reaches a 0-legitimate, 0-stable
/// configuration. Throws ExplorationError when the instance cannot be packed
/// or the full adversary class is requested beyond the default limits, and
/// std::logic_error when an explicit height closure is violated.
ExplorationResult explore(const Topology& topo, const Protocol& protocol,
                          const AdversaryClass& adversary, const ExplorationBudget& budget,
                          const ExploreOptions& options = {});

/// Exact worst-case action count of `v`. Throws ExplorationError when the
/// search is inexhaustive or does not converge.
std::uint64_t worst_case_actions(const Topology& topo, const Protocol& protocol, ProcessId v,
                                 const ExplorationBudget& budget,
                                 const AdversaryClass& adversary = AdversaryClass::silent());

struct ContainmentCertificate {
  Verdict status = Verdict::indeterminate;  // pass = certified
  std::string reason;
  std::optional<std::uint64_t> max_perturbations;  // nullopt = unbounded
  std::map<ProcessId, std::optional<std::uint64_t>> max_changes;  // c-correct processes
  std::size_t states = 0;
  std::string coverage;
  std::optional<ExecutionTrace> counterexample;

  /// Largest per-process change count, nullopt if any is unbounded.
  std::optional<std::uint64_t> worst_changes() const;
};

/// Checks, over every B-fair execution from each start under the adversary
/// class, that c-correct processes change S-variables finitely often, at
/// most `params.k` times each, in at most `params.t` c-perturbations, and
/// that executions settle in c-legitimate configurations. Starts must be
/// c-legitimate and c-stable (std::invalid_argument otherwise).
ContainmentCertificate certify_temporal_containment(const Topology& topo, const Protocol& protocol,
                                                    const std::vector<Configuration>& starts,
                                                    const ContainmentParams& params,
                                                    const AdversaryClass& adversary,
                                                    const ExplorationBudget& budget);

/// Every configuration with parents in {⊥} ∪ channels and heights <= cap,
/// filtered to those that are 0-legitimate and 0-stable.
std::vector<Configuration> legitimate_stable_configurations(const Topology& topo,
                                                            const Protocol& protocol,
                                                            Height height_cap);

/// Every configuration with parents in {⊥} ∪ channels and heights <= cap.
std::vector<Configuration> all_configurations(const Topology& topo, Height height_cap);

}  // namespace sstab

#endif  // SSTAB_EXPLORER_HPP_
