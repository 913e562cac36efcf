// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include <memory>

#include "doctest.h"
#include "sstab/analysis.hpp"
#include "sstab/simulator.hpp"
#include "../support/fixtures.hpp"

using namespace sstab;

TEST_CASE("the canonical legitimate configuration is quiescent") {
  for (const char* spec : {"line:5", "ring:6:byz=3", "grid:3x3:byz=far", "star:5:byz=4"}) {
    Topology t = fixtures::gen(spec);
    Configuration c = legitimate_configuration(t);
    CHECK(is_c_legitimate(c, t, cafs_protocol(), 0));
    CHECK(activable_correct(cafs_protocol(), c, t).empty());
  }
}

TEST_CASE("fault-free runs reach a spanning tree") {
  Topology t = fixtures::gen("random:8:seed=2");
  Protocol p = cafs_protocol();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Simulator sim(t, p, random_configuration(t, 10, seed),
                  Scheduler({SchedulerKind::random_fair, 3, DaemonMode::distributed, seed}, 8),
                  Adversary({}, t));
    CHECK(sim.run(100000) == StopReason::quiescent);
    CHECK(is_c_legitimate(sim.config(), t, p, 0));
    // a spanning tree, not necessarily breadth-first: every parent chain ends at the root
    for (ProcessId v = 0; v < 8; ++v) {
      ProcessId u = v;
      for (int hops = 0; u != t.root && hops < 8; ++hops) u = t.neighbors[u][*sim.config()[u].parent];
      CHECK(u == t.root);
      CHECK(sim.config()[v].height <= 7);
    }
  }
}

TEST_CASE("same seed, same run") {
  Topology t = fixtures::gen("ring:5:byz=2");
  auto make = [&] {
    AdversaryStrategy a;
    a.kind = AdversaryKind::random_writes;
    a.seed = 8;
    return std::make_unique<Simulator>(
        t, cafs_protocol(), random_configuration(t, 4, 8),
        Scheduler({SchedulerKind::random_fair, 2, DaemonMode::central, 8}, 5), Adversary(a, t));
  };
  auto x = make(), y = make();
  x->run(200);
  y->run(200);
  CHECK(serialize_trace(x->trace()) == serialize_trace(y->trace()));
}

TEST_CASE("step and tick limits") {
  Topology t = fixtures::rab();
  AdversaryStrategy a;
  a.kind = AdversaryKind::oscillator;
  a.period = 2;
  Simulator sim(t, cafs_protocol(), legitimate_configuration(t),
                Scheduler({SchedulerKind::round_robin, 1, DaemonMode::distributed, 0}, 3),
                Adversary(a, t));
  CHECK(sim.run(1000, 25) == StopReason::tick_limit);
  CHECK(sim.current_tick() == 25);
  CHECK(sim.run(sim.step_count() + 3) == StopReason::step_limit);
}

TEST_CASE("swapping the adversary mid-run keeps the trace consistent") {
  Topology t = fixtures::gen("line:4:byz=3");
  Protocol p = greedy_protocol();
  Simulator sim(t, p, legitimate_configuration(t),
                Scheduler({SchedulerKind::round_robin, 2, DaemonMode::distributed, 0}, 4),
                Adversary({}, t));
  CHECK(sim.run(100) == StopReason::quiescent);
  AdversaryStrategy osc;
  osc.kind = AdversaryKind::oscillator;
  osc.start = sim.current_tick();
  osc.periods = 3;
  osc.period = 2;
  sim.set_adversary(Adversary(osc, t));
  sim.run(1000, 100);
  CHECK(sim.step_count() > 0);
  CHECK(replay(sim.trace(), t, p).ok);
}
