// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>

#include "doctest.h"
#include "sstab/scheduling.hpp"
#include "../support/fixtures.hpp"

using namespace sstab;

namespace {

SchedulerPolicy policy(SchedulerKind k, std::uint32_t b, DaemonMode d, std::uint64_t seed = 0) {
  return {k, b, d, seed};
}

bool contains(const std::vector<ProcessId>& s, ProcessId v) {
  return std::find(s.begin(), s.end(), v) != s.end();
}

}  // namespace

TEST_CASE("central round robin moves past the last pick") {
  Scheduler s(policy(SchedulerKind::round_robin, 3, DaemonMode::central), 4);
  std::vector<ProcessId> one{1};
  CHECK(s.select(one, 0) == std::vector<ProcessId>{1});
  std::vector<ProcessId> act{1, 3};
  CHECK(s.select(act, 1) == std::vector<ProcessId>{3});
  CHECK(s.select(act, 2) == std::vector<ProcessId>{1});
}

TEST_CASE("the adversarial scheduler is forced at the bound") {
  Scheduler s(policy(SchedulerKind::adversarial_bounded, 3, DaemonMode::central), 3);
  std::vector<ProcessId> act{1, 2};
  std::vector<std::vector<ProcessId>> picks;
  for (int i = 0; i < 12; ++i) picks.push_back(s.select(act, i));
  int wait2 = 0;
  for (const auto& p : picks) {
    CHECK(p.size() == 1);
    wait2 = contains(p, 2) ? 0 : wait2 + 1;
    CHECK(wait2 <= 2);
  }
  CHECK(std::count_if(picks.begin(), picks.end(), [](auto& p) { return contains(p, 2); }) >= 4);
}

TEST_CASE("random fair selection is deterministic per seed") {
  std::vector<ProcessId> act{0, 2, 3, 5};
  for (auto d : {DaemonMode::central, DaemonMode::distributed}) {
    Scheduler a(policy(SchedulerKind::random_fair, 3, d, 42), 6);
    Scheduler b(policy(SchedulerKind::random_fair, 3, d, 42), 6);
    for (int i = 0; i < 50; ++i) CHECK(a.select(act, i) == b.select(act, i));
  }
}

TEST_CASE("no continuously activable process waits B steps") {
  std::mt19937_64 rng(9);
  for (auto kind : {SchedulerKind::round_robin, SchedulerKind::random_fair,
                    SchedulerKind::adversarial_bounded})
    for (auto d : {DaemonMode::central, DaemonMode::distributed})
      for (std::uint32_t b : {1u, 2u, 3u, 5u}) {
        // central daemons honor B only when B covers every contender
        const std::size_t n = d == DaemonMode::central ? std::max<std::uint32_t>(b, 1) : 6;
        INFO("kind " << to_string(kind) << " daemon " << to_string(d) << " B " << b);
        Scheduler s(policy(kind, b, d, b), n);
        std::vector<std::uint32_t> wait(n, 0);
        for (int step = 0; step < 3000; ++step) {
          std::vector<ProcessId> act;
          for (ProcessId v = 0; v < n; ++v)
            if (rng() % (2 + step % 4) != 0) act.push_back(v);
          if (act.empty()) act.push_back(0);
          auto sel = s.select(act, step);
          REQUIRE_FALSE(sel.empty());
          CHECK(std::is_sorted(sel.begin(), sel.end()));
          if (d == DaemonMode::central) CHECK(sel.size() == 1);
          for (ProcessId v = 0; v < n; ++v) {
            const bool a = contains(act, v);
            if (contains(sel, v)) CHECK(a);
            wait[v] = a && !contains(sel, v) ? wait[v] + 1 : 0;
            CHECK(wait[v] < std::max<std::uint32_t>(b, 1));
          }
        }
      }
}

TEST_CASE("scheduler argument checks") {
  CHECK_THROWS(Scheduler(policy(SchedulerKind::random_fair, 0, DaemonMode::central), 2));
  Scheduler s(policy(SchedulerKind::random_fair, 2, DaemonMode::central), 2);
  std::vector<ProcessId> none;
  CHECK_THROWS(s.select(none, 0));
  CHECK(parse_scheduler_kind("adversarial_bounded") == SchedulerKind::adversarial_bounded);
  CHECK(parse_daemon_mode("central") == DaemonMode::central);
  CHECK_THROWS(parse_scheduler_kind("lifo"));
}

TEST_CASE("silent adversary never writes") {
  Topology t = fixtures::rab();
  Adversary a({}, t);
  Configuration c({nil_state(0), nil_state(0), nil_state(7)});
  for (int tick = 0; tick < 10; ++tick) CHECK(a.act(c, tick).empty());
  CHECK(a.finished(c, 0));
}

TEST_CASE("root impersonator writes once") {
  Topology t = fixtures::rab();
  AdversaryStrategy st;
  st.kind = AdversaryKind::root_impersonator;
  Adversary a(st, t);
  Configuration c({nil_state(0), nil_state(0), parent_state(0, 5)});
  auto w = a.act(c, 0);
  REQUIRE(w.size() == 1);
  CHECK(w[0].process == 2);
  CHECK(w[0].state == nil_state(0));
  c[2] = w[0].state;
  for (int tick = 1; tick < 5; ++tick) CHECK(a.act(c, tick).empty());
}

TEST_CASE("oscillator with period 1 alternates every tick") {
  Topology t = fixtures::rab();
  AdversaryStrategy st;
  st.kind = AdversaryKind::oscillator;
  st.period = 1;
  st.low = 0;
  st.high = 100;
  st.height_cap = 100;
  Adversary a(st, t);
  Configuration c({nil_state(0), nil_state(0), parent_state(0, 100)});
  for (int tick = 0; tick < 8; ++tick) {
    auto w = a.act(c, tick);
    REQUIRE(w.size() == 1);
    CHECK(w[0].state == (tick % 2 == 0 ? nil_state(0) : parent_state(0, 100)));
    c[2] = w[0].state;
  }
}

TEST_CASE("random writes stay on Byzantine processes under the cap") {
  Topology t = fixtures::gen("random:7:byz=rand2:seed=4");
  AdversaryStrategy st;
  st.kind = AdversaryKind::random_writes;
  st.seed = 5;
  Adversary a(st, t);
  CHECK(a.height_cap() == default_height_cap(t));
  Configuration c;
  c.states.assign(7, nil_state(0));
  for (int tick = 0; tick < 200; ++tick)
    for (const auto& w : a.act(c, tick)) {
      CHECK(t.is_byzantine(w.process));
      CHECK(w.state.height <= a.height_cap());
      if (w.state.parent) CHECK(*w.state.parent < t.degree(w.process));
      c[w.process] = w.state;
    }
}

TEST_CASE("replay adversary follows its script") {
  Topology t = fixtures::rab();
  AdversaryStrategy st;
  st.kind = AdversaryKind::replay;
  st.script = {{2, {2, nil_state(4)}}, {5, {2, nil_state(1)}}};
  Adversary a(st, t);
  Configuration c({nil_state(0), nil_state(0), nil_state(0)});
  CHECK(a.act(c, 0).empty());
  CHECK(a.act(c, 2).size() == 1);
  CHECK(a.act(c, 5)[0].state == nil_state(1));
  CHECK(a.finished(c, 6));
  CHECK_FALSE(a.finished(c, 3));
}
