// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "sstab/analysis.hpp"
#include "sstab/cli.hpp"
#include "sstab/protocols.hpp"
#include "sstab/trace_store.hpp"
#include "../support/fixtures.hpp"

using namespace sstab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sstab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  fs::path p = fs::temp_directory_path() / "sstab_cli_test";
  fs::create_directories(p);
  return p;
}

std::string write_file(const std::string& name, const std::string& text) {
  fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run on a fault-free line passes with no perturbations") {
  std::string topo = write_file("line3.topo", "n 3\nroot 0\nbyzantine\n0: 1\n1: 0 2\n2: 1\n");
  std::string report = (scratch_dir() / "line3.json").string();
  auto r = cli({"run", "--topology", topo, "--protocol", "cafs", "--adversary", "silent",
                "--report-out", report});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["schema"] == "sstab-report/1");
  CHECK(j["perturbations"].empty());
}

TEST_CASE("run with an oscillator on r-a-b stays within t and k") {
  std::string report = (scratch_dir() / "rab.json").string();
  auto r = cli({"run", "--generate", "line:3:byz=2", "--adversary", "oscillator", "--params",
                "t=6,k=2,c=0", "--report-out", report, "--steps", "2000"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["perturbations"].size() <= 6);
}

TEST_CASE("greedy under an oscillator fails the change verdict") {
  std::string csv = (scratch_dir() / "greedy.csv").string();
  auto r = cli({"run", "--generate", "line:6:byz=5", "--protocol", "greedy", "--adversary",
                "oscillator", "--steps", "1000", "--csv-out", csv});
  CHECK(r.code == 2);
  CHECK(slurp(csv).find("max_changes_per_process,") != std::string::npos);
  CHECK(slurp(csv).find(",fail,") != std::string::npos);
}

TEST_CASE("exit codes for bad input") {
  CHECK(cli({"run", "--bogus"}).code == kExitUsage);
  CHECK(cli({"run", "--generate", "line:x"}).code == kExitUsage);
  CHECK(cli({"run", "--generate", "line:0"}).code == kExitTopology);
  CHECK(cli({"explore", "--generate", "line:3", "--scheduler", "random_fair"}).code == kExitUsage);
  std::string bad = write_file("byzroot.topo", "n 2\nroot 0\nbyzantine 0\n0: 1\n1: 0\n");
  auto r = cli({"run", "--topology", bad});
  CHECK(r.code == kExitTopology);
  CHECK(r.err.find("root is Byzantine") != std::string::npos);
  CHECK(cli({"run", "--topology", (scratch_dir() / "missing.topo").string()}).code == kExitTopology);
}

TEST_CASE("traces written by run replay and re-report identically") {
  std::string trace = (scratch_dir() / "run.trace").string();
  auto r = cli({"run", "--generate", "ring:5:byz=2", "--adversary", "random_writes", "--seed", "4",
                "--steps", "300", "--trace-out", trace});
  REQUIRE((r.code == 0 || r.code == 2 || r.code == 3));
  Topology t = fixtures::gen("ring:5:byz=2");
  auto tr = parse_trace(slurp(trace));
  auto rp = replay(tr, t, cafs_protocol());
  CHECK(rp.ok);
  CHECK(serialize_trace(rp.rerecorded) == slurp(trace));
  auto again = cli({"report", "--trace", trace, "--generate", "ring:5:byz=2"});
  CHECK(again.code == r.code);
  CHECK(cli({"report", "--trace", trace, "--generate", "ring:5"}).code == kExitTopology);
}

TEST_CASE("several seeded runs") {
  std::string report = (scratch_dir() / "runs.json").string();
  auto r = cli({"run", "--generate", "line:4:byz=3", "--runs", "4", "--jobs", "2", "--report-out",
                report});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["schema"] == "sstab-runs/1");
  CHECK(j["runs"].size() == 4);
}

TEST_CASE("explore reports the exact worst case") {
  std::string report = (scratch_dir() / "explore.json").string();
  auto r = cli({"explore", "--generate", "line:3:byz=2", "--scheduler", "adversarial_bounded",
                "--report-out", report});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["schema"] == "sstab-explore/1");
  CHECK(j["converged"] == true);
  CHECK(j["max_actions"]["1"] == 2);
  auto cert = cli({"explore", "--generate", "line:3:byz=2", "--adversary-class", "full",
                   "--certify"});
  CHECK(cert.code == 0);
  CHECK(nlohmann::json::parse(cert.out)["schema"] == "sstab-certificate/1");
}

TEST_CASE("greedy demo") {
  SUBCASE("ten periods on five correct processes") {
    std::string report = (scratch_dir() / "demo.json").string();
    auto r = cli({"demo-greedy", "--periods", "10", "--report-out", report});
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(slurp(report));
    CHECK(j["schema"] == "sstab-demo/1");
    CHECK(j["protocols"]["greedy"]["far_changes"].get<int>() >= 10);
    CHECK(j["protocols"]["cafs"]["far_changes"].get<int>() <= j["cafs_certificate"]["certified_changes_far"].get<int>());
  }
  SUBCASE("no periods, no changes") {
    std::string report = (scratch_dir() / "demo0.json").string();
    auto r = cli({"demo-greedy", "--periods", "0", "--report-out", report});
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(slurp(report));
    CHECK(j["protocols"]["greedy"]["far_changes"] == 0);
    CHECK(j["protocols"]["cafs"]["far_changes"] == 0);
  }
  SUBCASE("same seeds, same bytes") {
    std::string a = (scratch_dir() / "demo_a.json").string();
    std::string b = (scratch_dir() / "demo_b.json").string();
    auto x = cli({"demo-greedy", "--seed", "7", "--periods", "5", "--report-out", a});
    auto y = cli({"demo-greedy", "--seed", "7", "--periods", "5", "--report-out", b});
    CHECK(x.out == y.out);
    CHECK(slurp(a) == slurp(b));
    CHECK_FALSE(slurp(a).empty());
  }
}
