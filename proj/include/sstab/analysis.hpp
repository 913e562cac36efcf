// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SSTAB_ANALYSIS_HPP_
#define SSTAB_ANALYSIS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sstab/trace_store.hpp"

namespace sstab {

enum class Verdict { pass, fail, indeterminate };
std::string_view to_string(Verdict v);

/// Exit-code vocabulary shared by every CLI subcommand.
int exit_code(Verdict v);

/// Every c-correct process satisfies the local specification.
bool is_c_legitimate(const Configuration& config, const Topology& topo, const Protocol& protocol,
                     std::uint64_t c);

enum class Stability { stable, unstable, indeterminate };
std::string_view to_string(Stability s);

enum class StabilityMethod {
  /// Radius 0 with a protocol whose every action changes S-variables:
  /// stable iff no correct process is activable. Closure otherwise.
  automatic,
  /// Exhaustive search of every Byzantine-silent execution.
  closure,
};

/// Whether some execution in which Byzantine processes stay silent changes
/// an S-variable of a c-correct process. The closure enumerates every
/// nonempty subset of activable correct processes at every reachable
/// configuration; running out of `max_configurations` yields indeterminate.
Stability is_c_stable(const Configuration& config, const Topology& topo, const Protocol& protocol,
                      std::uint64_t c, StabilityMethod method = StabilityMethod::automatic,
                      std::size_t max_configurations = 200000);

struct ContainmentParams {
  std::uint64_t c = 0;  // containment radius
  std::uint64_t f = 0;  // Byzantine budget
  std::uint64_t t = 0;  // max c-perturbations
  std::uint64_t k = 0;  // max S-variable changes per c-correct process
};

/// c = 0, f = n - 1, t = nΔ^d, k = Δ^d.
ContainmentParams tree_protocol_params(const Topology& topo);

/// Parses "t=6,k=2,c=0,f=2" on top of `base`.
ContainmentParams parse_params(std::string_view text, ContainmentParams base);

struct PerturbationInterval {
  std::uint64_t start = 0;  // configuration index
  std::uint64_t end = 0;
  std::map<ProcessId, std::uint64_t> changes;  // c-correct processes only

  bool operator==(const PerturbationInterval&) const = default;
};

struct PerturbationScan {
  /// configurations that are c-legitimate and c-stable
  std::vector<bool> legitimate_stable;
  std::optional<std::uint64_t> first_legitimate_stable;
  std::vector<PerturbationInterval> intervals;
  /// The trace ends inside a disturbance that has not settled yet.
  bool open_interval = false;
  bool stability_indeterminate = false;
};

/// Splits the execution into segments between consecutive c-legitimate and
/// c-stable configurations; a segment is a perturbation when some c-correct
/// process changes an S-variable inside it. `configs` is the replayed
/// sequence (configs[i + 1] follows trace.steps[i]).
PerturbationScan perturbation_scan(const ExecutionTrace& trace,
                                   const std::vector<Configuration>& configs, const Topology& topo,
                                   const Protocol& protocol, std::uint64_t c);

struct VerdictRecord {
  std::string name;
  std::optional<std::uint64_t> measured;
  std::optional<std::uint64_t> bound;
  Verdict status = Verdict::pass;
  std::string scope;  // "witnessed" (one trace) or "certified" (all executions)
  std::string note;
};

struct ContainmentReport {
  std::string protocol;
  ContainmentParams params;
  double slack = 4.0;
  bool stabilized = false;
  /// Steps with at least one correct action before the first c-legitimate
  /// and c-stable configuration.
  std::optional<std::uint64_t> stabilization_steps;
  std::optional<std::uint64_t> first_legitimate_stable;
  std::vector<PerturbationInterval> perturbations;
  bool open_interval = false;
  std::map<ProcessId, std::uint64_t> post_stabilization_changes;  // c-correct processes
  std::vector<VerdictRecord> verdicts;

  Verdict overall() const;
  const VerdictRecord* find(std::string_view name) const;
};

ContainmentReport containment_report(const ExecutionTrace& trace,
                                     const std::vector<Configuration>& configs,
                                     const Topology& topo, const Protocol& protocol,
                                     const ContainmentParams& params, double slack = 4.0);

/// Replays the trace first; a failed replay becomes a failing "replay" verdict.
ContainmentReport containment_report(const ExecutionTrace& trace, const Topology& topo,
                                     const Protocol& protocol, const ContainmentParams& params,
                                     double slack = 4.0);

std::string report_to_json(const ContainmentReport& report);
std::string verdicts_to_csv(const std::vector<VerdictRecord>& verdicts);
Verdict combine(const std::vector<VerdictRecord>& verdicts);

}  // namespace sstab

#endif  // SSTAB_ANALYSIS_HPP_
