// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SSTAB_TOPOLOGY_HPP_
#define SSTAB_TOPOLOGY_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sstab {

using ProcessId = std::uint32_t;
using Channel = std::uint32_t;

/// Communication graph with local port numbering.
///
/// `neighbors[v][k]` is the process reached through channel k of v. The
/// channel order is input data: the cyclic successor used by the spanning
/// tree protocol walks it, so two topologies that differ only in port order
/// are different systems.
struct Topology {
  std::size_t process_count = 0;
  std::vector<std::vector<ProcessId>> neighbors;
  ProcessId root = 0;
  std::vector<ProcessId> byzantine;  // sorted, unique

  bool is_byzantine(ProcessId v) const;
  bool is_correct(ProcessId v) const { return !is_byzantine(v); }
  std::size_t degree(ProcessId v) const { return neighbors.at(v).size(); }

  /// Channel of `u` in v's neighbor list, if adjacent.
  std::optional<Channel> channel_to(ProcessId v, ProcessId u) const;

  std::vector<ProcessId> correct_processes() const;

  bool operator==(const Topology&) const = default;
};

struct Violation {
  std::string kind;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

/// Reports every violated topology invariant. Empty iff the topology is a
/// connected undirected simple graph whose root is correct and whose correct
/// processes induce a connected subgraph.
ValidationReport validate(const Topology& topo);

class TopologyError : public std::runtime_error {
 public:
  explicit TopologyError(const std::string& what, ValidationReport report = {})
      : std::runtime_error(what), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses the plain-text topology format and validates the result.
/// Throws ParseError (with line number) or TopologyError.
Topology load_topology(std::string_view text);

/// Inverse of load_topology. Canonical: the topology digest hashes this text.
std::string serialize_topology(const Topology& topo);

std::uint64_t topology_digest(const Topology& topo);

/// Correct processes at graph distance >= c from every Byzantine process.
/// Distances are measured in the full graph; with no Byzantine process every
/// process qualifies.
std::vector<ProcessId> c_correct_set(const Topology& topo, std::uint64_t c);

inline constexpr std::uint32_t kUnreachable = UINT32_MAX;

struct GraphMetrics {
  std::size_t max_degree = 0;        // Δ
  std::uint32_t correct_diameter = 0;  // d
  std::size_t n = 0;
  std::size_t f = 0;
  /// δ(v): distance to the root inside the correct-induced subgraph;
  /// nullopt for Byzantine processes.
  std::vector<std::optional<std::uint32_t>> delta_to_root;
};

GraphMetrics graph_metrics(const Topology& topo);

/// Breadth-first distances from `sources`. When `correct_only` is set,
/// Byzantine processes are neither sources nor traversed.
std::vector<std::uint32_t> bfs_distances(const Topology& topo,
                                         const std::vector<ProcessId>& sources,
                                         bool correct_only);

/// Saturating integer power, used for the Δ^d style bounds.
std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp);

enum class GraphKind { line, ring, star, grid, random_connected };

/// How Byzantine processes are placed by `generate`.
struct ByzantinePlacement {
  enum class Rule { none, explicit_ids, far_end, random_count };
  Rule rule = Rule::none;
  std::vector<ProcessId> ids;  // explicit_ids
  std::size_t count = 0;       // random_count
};

struct GeneratorSpec {
  GraphKind kind = GraphKind::line;
  std::size_t size = 1;      // process count; grid uses rows x cols
  std::size_t rows = 0;
  std::size_t cols = 0;
  double edge_probability = 0.3;  // random_connected extra edges
  ByzantinePlacement placement;
  std::uint64_t seed = 0;
};

/// Builds a topology rooted at process 0 with ports in ascending id order.
/// Deterministic for a fixed spec. Throws TopologyError when the placement
/// cannot keep the correct subgraph connected within the retry limit.
Topology generate(const GeneratorSpec& spec);

/// Parses inline generator specs such as "line:5:byz=4", "ring:6",
/// "grid:2x3:byz=far", "random:6:seed=3:byz=rand2:p=0.4".
GeneratorSpec parse_generator_spec(std::string_view text);

}  // namespace sstab

#endif  // SSTAB_TOPOLOGY_HPP_
