// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SSTAB_TRACE_STORE_HPP_
#define SSTAB_TRACE_STORE_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sstab/state_model.hpp"

namespace sstab {

struct TraceHeader {
  std::uint64_t topology_digest = 0;
  std::size_t process_count = 0;
  std::string protocol;
  std::string scheduler;  // free-form "key=value ..." description
  std::string adversary;
  std::uint32_t snapshot_every = 32;

  bool operator==(const TraceHeader&) const = default;
};

struct TraceStep {
  std::uint64_t index = 0;
  std::uint64_t tick = 0;
  std::vector<ProcessId> selected;      // ascending
  std::vector<ByzantineWrite> writes;   // ascending by process
  std::vector<ProcessId> changed;       // processes whose S-variables differ
  std::uint64_t digest = 0;             // of the resulting configuration
  std::optional<Configuration> snapshot;

  bool operator==(const TraceStep&) const = default;
};

struct ExecutionTrace {
  TraceHeader header;
  Configuration initial;
  std::vector<TraceStep> steps;

  bool operator==(const ExecutionTrace&) const = default;
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds a trace step by step. Every appended step is re-executed and
/// compared with the configuration the caller claims it produced, so a
/// recorder can never seal an unreplayable trace.
class TraceRecorder {
 public:
  TraceRecorder(TraceHeader header, const Topology& topo, const Protocol& protocol,
                Configuration initial);

  const TraceStep& append(std::uint64_t tick, std::vector<ProcessId> selected,
                          std::vector<ByzantineWrite> writes, const Configuration& result);

  const Configuration& current() const { return current_; }
  std::size_t step_count() const { return trace_.steps.size(); }
  const ExecutionTrace& trace() const { return trace_; }

  /// Marks the final step with a snapshot and returns the trace.
  ExecutionTrace seal() const;

 private:
  const Topology* topo_;
  const Protocol* protocol_;
  ExecutionTrace trace_;
  Configuration current_;
};

TraceHeader make_header(const Topology& topo, const Protocol& protocol, std::string scheduler,
                        std::string adversary, std::uint32_t snapshot_every = 32);

std::string serialize_trace(const ExecutionTrace& trace);

/// Strict parser for serialize_trace output. Throws ParseError.
ExecutionTrace parse_trace(std::string_view text);

struct ReplayResult {
  bool ok = true;
  std::optional<std::uint64_t> failed_step;
  std::string message;
  Configuration final_config;
  /// configurations[0] is the initial one, configurations[i + 1] follows step i.
  std::vector<Configuration> configurations;
  /// Re-recording of the replayed execution; byte-identical to the input
  /// when the input is untampered.
  ExecutionTrace rerecorded;
};

/// Re-executes every step and checks digests, change flags and snapshots.
/// Throws TraceError when the header does not match the topology/protocol.
ReplayResult replay(const ExecutionTrace& trace, const Topology& topo, const Protocol& protocol);

/// Processes whose S-variables differ between two configurations.
std::vector<ProcessId> changed_processes(const Configuration& before, const Configuration& after);

}  // namespace sstab

#endif  // SSTAB_TRACE_STORE_HPP_
