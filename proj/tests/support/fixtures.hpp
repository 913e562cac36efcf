// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SSTAB_TESTS_SUPPORT_FIXTURES_HPP_
#define SSTAB_TESTS_SUPPORT_FIXTURES_HPP_

#include <string>

#include "sstab/protocols.hpp"
#include "sstab/topology.hpp"
#include "../oracles/brute_force.hpp"

namespace fixtures {

inline sstab::Topology parse(const std::string& text) { return sstab::load_topology(text); }

inline sstab::Topology gen(const std::string& spec) {
  return sstab::generate(sstab::parse_generator_spec(spec));
}

/// r - a - b with b Byzantine.
inline sstab::Topology rab() {
  return parse("n 3\nroot 0\nbyzantine 2\n0: 1\n1: 0 2\n2: 1\n");
}

/// r - a, no Byzantine.
inline sstab::Topology ra() { return parse("n 2\nroot 0\nbyzantine\n0: 1\n1: 0\n"); }

inline oracle::Instance to_oracle(const sstab::Topology& t) {
  oracle::Instance g;
  g.root = static_cast<int>(t.root);
  for (const auto& nb : t.neighbors) g.adj.emplace_back(nb.begin(), nb.end());
  g.byz.assign(t.process_count, false);
  for (auto b : t.byzantine) g.byz[b] = true;
  return g;
}

}  // namespace fixtures

#endif  // SSTAB_TESTS_SUPPORT_FIXTURES_HPP_
