// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SSTAB_STATE_MODEL_HPP_
#define SSTAB_STATE_MODEL_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sstab/topology.hpp"

namespace sstab {

using Height = std::uint64_t;

/// S-variables of one process: parent channel (nullopt is ⊥) and height.
/// A stored channel may be out of range for the process degree; protocols
/// treat it exactly like ⊥.
struct ProcessState {
  std::optional<Channel> parent;
  Height height = 0;

  bool operator==(const ProcessState&) const = default;
};

inline ProcessState nil_state(Height h) { return {std::nullopt, h}; }
inline ProcessState parent_state(Channel c, Height h) { return {c, h}; }

struct Configuration {
  std::vector<ProcessState> states;

  Configuration() = default;
  explicit Configuration(std::vector<ProcessState> s) : states(std::move(s)) {}

  std::size_t size() const { return states.size(); }
  const ProcessState& operator[](ProcessId v) const { return states.at(v); }
  ProcessState& operator[](ProcessId v) { return states.at(v); }

  bool operator==(const Configuration&) const = default;
};

/// What a process can read in one atomic step: its own state and its
/// neighbors' states indexed by channel. Guards and actions see only this.
struct Neighborhood {
  ProcessId self = 0;
  bool is_root = false;
  ProcessState state;
  std::vector<ProcessState> neighbors;

  std::size_t degree() const { return neighbors.size(); }
  /// P_v ∈ N_v.
  bool parent_valid() const { return state.parent && *state.parent < neighbors.size(); }
  const ProcessState& parent() const { return neighbors.at(*state.parent); }

  bool operator==(const Neighborhood&) const = default;
};

/// Neighborhood plus per-channel correctness flags. The flags are an
/// analysis-side oracle: the local specification may consult them, rules
/// cannot (they receive the Neighborhood slice).
struct LocalView : Neighborhood {
  std::vector<bool> neighbor_correct;

  bool operator==(const LocalView&) const = default;
};

struct Rule {
  std::string name;
  std::function<bool(const Neighborhood&)> guard;
  std::function<ProcessState(const Neighborhood&)> action;
};

struct Protocol {
  std::string id;
  std::vector<Rule> rules;  // first enabled rule fires
  std::function<bool(const LocalView&)> spec;
  /// True when every action changes at least one S-variable. Lets the
  /// stability classifier skip the exhaustive closure at radius 0.
  bool actions_change_s_variables = false;
};

/// Both fields of ProcessState are S-variables for every shipped protocol.
inline bool same_s_variables(const ProcessState& a, const ProcessState& b) { return a == b; }

struct ByzantineWrite {
  ProcessId process = 0;
  ProcessState state;

  bool operator==(const ByzantineWrite&) const = default;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ModelError when `config` does not cover every process.
void check_configuration(const Configuration& config, const Topology& topo);

LocalView local_view(const Configuration& config, const Topology& topo, ProcessId v);

std::vector<std::size_t> enabled_rules(const Protocol& protocol, const Neighborhood& view);

/// State produced by the first enabled rule, nullopt if none is enabled.
std::optional<ProcessState> next_state(const Protocol& protocol, const Neighborhood& view);

bool is_activable(const Protocol& protocol, const Configuration& config,
                  const Topology& topo, ProcessId v);

/// Correct processes with an enabled rule, ascending.
std::vector<ProcessId> activable_correct(const Protocol& protocol, const Configuration& config,
                                         const Topology& topo);

bool spec_holds(const Protocol& protocol, const Configuration& config, const Topology& topo,
                ProcessId v);

/// One composite-atomic step: every selected process runs its first enabled
/// action against the pre-step configuration, and those results plus the
/// Byzantine writes are installed together.
Configuration apply_step(const Configuration& config, const Topology& topo,
                         const Protocol& protocol, std::span<const ProcessId> selected,
                         std::span<const ByzantineWrite> writes);

/// "parent=<channel|NIL> height=<h>"
std::string format_state(const ProcessState& s);

/// One line per process: "<id> parent=<channel|NIL> height=<integer>".
std::string serialize_configuration(const Configuration& config);

/// Parses the serialization above; `first_line` offsets error line numbers.
Configuration parse_configuration(std::string_view text, std::size_t first_line = 1);

std::uint64_t configuration_digest(const Configuration& config);

}  // namespace sstab

#endif  // SSTAB_STATE_MODEL_HPP_
