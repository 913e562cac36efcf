// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "sstab/protocols.hpp"
#include "sstab/simulator.hpp"
#include "sstab/trace_store.hpp"
#include "../support/fixtures.hpp"
#include "../support/scripted.hpp"

using namespace sstab;

TEST_CASE("an empty run has a header and no steps") {
  Topology t = fixtures::ra();
  Protocol p = cafs_protocol();
  Configuration init({nil_state(0), parent_state(0, 1)});
  ExecutionTrace tr = fixtures::record(t, p, init, {});
  CHECK(tr.steps.empty());
  CHECK(tr.header.process_count == 2);
  CHECK(tr.header.topology_digest == topology_digest(t));
  CHECK(tr.header.protocol == "cafs");
  ExecutionTrace back = parse_trace(serialize_trace(tr));
  CHECK(back == tr);
  auto r = replay(back, t, p);
  CHECK(r.ok);
  CHECK(r.final_config == init);
}

TEST_CASE("a one-step root fix") {
  Topology t = fixtures::ra();
  Protocol p = cafs_protocol();
  Configuration init({parent_state(0, 0), parent_state(0, 1)});
  ExecutionTrace tr = fixtures::record(t, p, init, {{{0}, {}}});
  REQUIRE(tr.steps.size() == 1);
  CHECK(tr.steps[0].changed == std::vector<ProcessId>{0});
  REQUIRE(tr.steps[0].snapshot);
  CHECK((*tr.steps[0].snapshot)[0] == nil_state(0));
  CHECK(tr.steps[0].digest == configuration_digest(*tr.steps[0].snapshot));
}

TEST_CASE("exact text of a small trace") {
  Topology t = fixtures::rab();
  Protocol p = cafs_protocol();
  Configuration init({nil_state(0), parent_state(1, 1), nil_state(0)});
  ExecutionTrace tr = fixtures::record(t, p, init, {{{}, {{2, parent_state(0, 4)}}}, {{1}, {}}});
  std::string text = serialize_trace(tr);
  CHECK(text.rfind("sstab-trace 1\ntopology ", 0) == 0);
  CHECK(text.find("\nprocesses 3\nprotocol cafs\nscheduler script\nadversary script\n"
                  "snapshot-every 32\ninitial\n0 parent=NIL height=0\n1 parent=1 height=1\n"
                  "2 parent=NIL height=0\nend\nstep 0 tick 0 selected - writes 2:0:4 changed 2 digest ") !=
        std::string::npos);
  CHECK(text.find("step 1 tick 1 selected 1 writes - changed 1 digest ") != std::string::npos);
  CHECK(parse_trace(text) == tr);
  CHECK(serialize_trace(parse_trace(text)) == text);
}

TEST_CASE("replay reproduces recorded runs bit for bit") {
  Topology t = fixtures::gen("ring:5:byz=3");
  Protocol p = cafs_protocol();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    AdversaryStrategy adv;
    adv.kind = AdversaryKind::random_writes;
    adv.seed = seed;
    Simulator sim(t, p, random_configuration(t, 6, seed), Scheduler({SchedulerKind::random_fair, 3,
                  DaemonMode::distributed, seed}, 5), Adversary(adv, t), 4);
    sim.run(60);
    ExecutionTrace tr = sim.trace();
    auto r = replay(tr, t, p);
    REQUIRE(r.ok);
    CHECK(r.final_config == sim.config());
    CHECK(r.configurations.size() == tr.steps.size() + 1);
    CHECK(serialize_trace(r.rerecorded) == serialize_trace(tr));
    auto again = replay(r.rerecorded, t, p);
    CHECK(serialize_trace(again.rerecorded) == serialize_trace(tr));
  }
}

TEST_CASE("a tampered snapshot fails at that step") {
  Topology t = fixtures::gen("line:4");
  Protocol p = cafs_protocol();
  Simulator sim(t, p, random_configuration(t, 5, 3),
                Scheduler({SchedulerKind::round_robin, 3, DaemonMode::central, 0}, 4),
                Adversary({}, t), 2);
  sim.run(50);
  ExecutionTrace tr = sim.trace();
  REQUIRE(tr.steps.size() >= 2);
  REQUIRE(tr.steps[1].snapshot);
  (*tr.steps[1].snapshot)[2].height += 1;
  auto r = replay(tr, t, p);
  CHECK_FALSE(r.ok);
  CHECK(r.failed_step == 1u);
  CHECK(r.message.find("step 1") == 0);
}

TEST_CASE("a tampered digest fails at that step") {
  Topology t = fixtures::ra();
  Protocol p = cafs_protocol();
  ExecutionTrace tr = fixtures::record(t, p, Configuration({parent_state(0, 2), nil_state(0)}),
                                       {{{0, 1}, {}}});
  tr.steps[0].digest ^= 1;
  auto r = replay(tr, t, p);
  CHECK_FALSE(r.ok);
  CHECK(r.failed_step == 0u);
}

TEST_CASE("replay against the wrong topology is a header mismatch") {
  Protocol p = cafs_protocol();
  ExecutionTrace tr = fixtures::record(fixtures::rab(), p,
                                       Configuration({nil_state(0), nil_state(0), nil_state(0)}),
                                       {{{1}, {}}});
  try {
    replay(tr, fixtures::gen("line:3"), p);
    FAIL("expected TraceError");
  } catch (const TraceError& e) {
    CHECK(std::string(e.what()).find("header mismatch") != std::string::npos);
  }
  CHECK_THROWS_AS(replay(tr, fixtures::rab(), greedy_protocol()), TraceError);
}

TEST_CASE("the recorder refuses inconsistent streams") {
  Topology t = fixtures::ra();
  Protocol p = cafs_protocol();
  Configuration init({parent_state(0, 0), nil_state(0)});
  TraceRecorder rec(make_header(t, p, "s", "a"), t, p, init);
  CHECK_THROWS_AS(rec.append(0, {}, {}, init), TraceError);
  CHECK_THROWS_AS(rec.append(0, {0}, {}, init), TraceError);
  rec.append(3, {0, 1}, {}, apply_step(init, t, p, std::vector<ProcessId>{0, 1}, {}));
  CHECK_THROWS_AS(rec.append(2, {1}, {}, rec.current()), TraceError);
}

TEST_CASE("malformed trace text") {
  CHECK_THROWS_AS(parse_trace("sstab-trace 1\n"), ParseError);
  Topology t = fixtures::ra();
  Protocol p = cafs_protocol();
  std::string text = serialize_trace(
      fixtures::record(t, p, Configuration({parent_state(0, 0), nil_state(0)}), {{{0}, {}}}));
  std::string bad = text;
  bad.replace(bad.find("step 0"), 6, "step 5");
  CHECK_THROWS_AS(parse_trace(bad), ParseError);
  CHECK(changed_processes(Configuration({nil_state(0), nil_state(1)}),
                          Configuration({nil_state(0), nil_state(2)})) == std::vector<ProcessId>{1});
}
