// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "sstab/protocols.hpp"
#include "sstab/state_model.hpp"
#include "../support/fixtures.hpp"

using namespace sstab;

TEST_CASE("local views read neighbors by channel") {
  Topology t = fixtures::ra();
  Configuration c({nil_state(0), parent_state(0, 1)});
  LocalView a = local_view(c, t, 1);
  REQUIRE(a.neighbors.size() == 1);
  CHECK(a.neighbors[0] == nil_state(0));
  CHECK(a.neighbor_correct == std::vector<bool>{true});
  CHECK_FALSE(a.is_root);
  CHECK(local_view(c, t, 1) == a);

  Topology single = fixtures::parse("n 1\nroot 0\nbyzantine\n0:\n");
  CHECK(local_view(Configuration({nil_state(4)}), single, 0).neighbors.empty());

  Topology tri = fixtures::parse("n 3\nroot 0\nbyzantine 2\n0: 1 2\n1: 2 0\n2: 0 1\n");
  Configuration tc({nil_state(0), nil_state(5), parent_state(1, 9)});
  LocalView v = local_view(tc, tri, 1);
  CHECK(v.neighbors == std::vector<ProcessState>{parent_state(1, 9), nil_state(0)});
  CHECK(v.neighbor_correct == std::vector<bool>{false, true});
  CHECK_THROWS_AS(local_view(tc, tri, 7), ModelError);
}

TEST_CASE("enabled rules of the tree protocol") {
  Protocol p = cafs_protocol();
  Topology t = fixtures::ra();
  CHECK(enabled_rules(p, local_view(Configuration({nil_state(0), nil_state(0)}), t, 0)).empty());
  auto root_bad = enabled_rules(p, local_view(Configuration({parent_state(0, 0), nil_state(0)}), t, 0));
  REQUIRE(root_bad.size() == 1);
  CHECK(p.rules[root_bad[0]].name == "root");
  CHECK(enabled_rules(p, local_view(Configuration({nil_state(0), parent_state(0, 1)}), t, 1)).empty());
  auto a_bad = enabled_rules(p, local_view(Configuration({nil_state(0), parent_state(0, 3)}), t, 1));
  REQUIRE(a_bad.size() == 1);
  CHECK(p.rules[a_bad[0]].name == "non-root");
}

TEST_CASE("apply_step is composite-atomic") {
  Protocol p = cafs_protocol();
  SUBCASE("root fix leaves everyone else alone") {
    Topology t = fixtures::ra();
    Configuration c({parent_state(0, 0), parent_state(0, 7)});
    std::vector<ProcessId> sel{0};
    Configuration n = apply_step(c, t, p, sel, {});
    CHECK(n[0] == nil_state(0));
    CHECK(n[1] == parent_state(0, 7));
  }
  SUBCASE("writes-only step changes only the Byzantine process") {
    Topology t = fixtures::rab();
    Configuration c({nil_state(0), parent_state(0, 1), nil_state(0)});
    std::vector<ByzantineWrite> w{{2, parent_state(0, 5)}};
    Configuration n = apply_step(c, t, p, {}, w);
    CHECK(n[0] == c[0]);
    CHECK(n[1] == c[1]);
    CHECK(n[2] == parent_state(0, 5));
  }
  SUBCASE("two processes read the pre-step snapshot, in either order") {
    Topology t = fixtures::gen("line:4");
    Configuration c({parent_state(0, 2), nil_state(6), parent_state(0, 3), nil_state(1)});
    std::vector<ProcessId> ab{0, 2}, ba{2, 0};
    Configuration x = apply_step(c, t, p, ab, {});
    CHECK(x == apply_step(c, t, p, ba, {}));
    CHECK(x[0] == nil_state(0));
    // process 2 moves from channel 0 (process 1) to channel 1 (process 3)
    CHECK(x[2] == parent_state(1, 2));
    CHECK(x[1] == c[1]);
    CHECK(x[3] == c[3]);
  }
  SUBCASE("the new parent's height is read before the step") {
    Topology t = fixtures::gen("line:3");
    Configuration c({parent_state(0, 4), nil_state(9), parent_state(0, 0)});
    std::vector<ProcessId> sel{0, 1, 2};
    Configuration n = apply_step(c, t, p, sel, {});
    CHECK(n[0] == nil_state(0));
    CHECK(n[1] == parent_state(0, 5));   // root's old height 4
    CHECK(n[2] == parent_state(0, 10));  // 1's old height 9
  }
}

TEST_CASE("apply_step rejects malformed steps") {
  Protocol p = cafs_protocol();
  Topology t = fixtures::rab();
  Configuration c({parent_state(0, 3), nil_state(0), nil_state(0)});
  std::vector<ProcessId> none;
  std::vector<ProcessId> byz{2}, twice{0, 0};
  CHECK_THROWS_AS(apply_step(c, t, p, none, {}), ModelError);
  CHECK_THROWS_AS(apply_step(c, t, p, byz, {}), ModelError);
  CHECK_THROWS_AS(apply_step(c, t, p, twice, {}), ModelError);
  Configuration quiet({nil_state(0), parent_state(0, 1), nil_state(0)});
  std::vector<ProcessId> one{1};
  CHECK_THROWS_AS(apply_step(quiet, t, p, one, {}), ModelError);
  std::vector<ByzantineWrite> to_correct{{1, nil_state(0)}};
  CHECK_THROWS_AS(apply_step(c, t, p, none, to_correct), ModelError);
  std::vector<ByzantineWrite> dup{{2, nil_state(1)}, {2, nil_state(2)}};
  CHECK_THROWS_AS(apply_step(c, t, p, none, dup), ModelError);
  CHECK_THROWS_AS(check_configuration(Configuration({nil_state(0)}), t), ModelError);
}

TEST_CASE("unselected and idle processes are never modified") {
  Protocol p = cafs_protocol();
  Topology t = fixtures::gen("ring:5:byz=3");
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Configuration c;
    for (ProcessId v = 0; v < 5; ++v) {
      std::uniform_int_distribution<int> pd(-1, 1), hd(0, 4);
      int par = pd(rng);
      c.states.push_back(par < 0 ? nil_state(hd(rng)) : parent_state(par, hd(rng)));
    }
    auto act = activable_correct(p, c, t);
    if (act.empty()) continue;
    std::vector<ProcessId> sel{act.front()};
    Configuration n = apply_step(c, t, p, sel, {});
    for (ProcessId v = 0; v < 5; ++v)
      if (v != act.front()) CHECK(n[v] == c[v]);
  }
}

TEST_CASE("configuration serialization") {
  Configuration c({nil_state(0), parent_state(1, 12), parent_state(0, 3)});
  std::string text = serialize_configuration(c);
  CHECK(text == "0 parent=NIL height=0\n1 parent=1 height=12\n2 parent=0 height=3\n");
  CHECK(parse_configuration(text) == c);
  CHECK(configuration_digest(c) == configuration_digest(parse_configuration(text)));
  CHECK(configuration_digest(c) != configuration_digest(Configuration({nil_state(0)})));
  CHECK_THROWS_AS(parse_configuration("0 parent=NIL height=0\n2 parent=NIL height=0\n"), ParseError);
  CHECK_THROWS_AS(parse_configuration("0 parent=x height=0\n"), ParseError);
}

TEST_CASE("heights near the top of the range") {
  Protocol p = cafs_protocol();
  Topology t = fixtures::ra();
  Configuration c({nil_state(UINT64_MAX), nil_state(0)});
  std::vector<ProcessId> a{1};
  CHECK_THROWS_AS(apply_step(c, t, p, a, {}), ModelError);
}
