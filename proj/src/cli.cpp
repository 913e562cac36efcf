// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sstab/cli.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "sstab/analysis.hpp"
#include "sstab/digest.hpp"
#include "sstab/explorer.hpp"
#include "sstab/protocols.hpp"
#include "sstab/simulator.hpp"

namespace sstab {
namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TopologyInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

struct TopologySource {
  std::string file;
  std::string generator;
  std::string fallback;  // used when neither flag is given; empty = required

  void add(CLI::App* app) {
    app->add_option("--topology", file, "Topology file");
    app->add_option("--generate", generator, "Generator spec, e.g. line:5:byz=4");
  }

  Topology load() const {
    std::string gen = generator;
    if (file.empty() && gen.empty()) gen = fallback;
    if (file.empty() == gen.empty())
      throw UsageError("exactly one of --topology and --generate is required");
    if (!gen.empty()) {
      GeneratorSpec spec;
      try {
        spec = parse_generator_spec(gen);
      } catch (const std::exception& e) {
        throw UsageError(std::string("bad --generate spec: ") + e.what());
      }
      try {
        return generate(spec);
      } catch (const TopologyError& e) {
        throw TopologyInputError(e.what());
      }
    }
    std::string text;
    {
      std::ifstream in(file, std::ios::binary);
      if (!in) throw TopologyInputError("cannot read topology " + file);
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    try {
      return load_topology(text);
    } catch (const TopologyError& e) {
      std::string msg = e.what();
      for (const auto& v : e.report()) msg += "\n  " + v.kind + ": " + v.message;
      throw TopologyInputError(msg);
    } catch (const ParseError& e) {
      throw TopologyInputError(e.what());
    }
  }
};

struct ScheduleFlags {
  std::string scheduler = "random_fair";
  std::string daemon = "distributed";
  std::uint32_t bound = 3;

  void add(CLI::App* app) {
    app->add_option("--scheduler", scheduler, "round_robin | random_fair | adversarial_bounded");
    app->add_option("--daemon", daemon, "central | distributed");
    app->add_option("--fairness-bound", bound, "Fairness bound B");
  }

  SchedulerPolicy policy(std::uint64_t seed) const {
    SchedulerPolicy p;
    p.kind = parse_scheduler_kind(scheduler);
    p.daemon = parse_daemon_mode(daemon);
    p.fairness_bound = bound;
    p.seed = seed;
    return p;
  }
};

struct AdversaryFlags {
  std::string kind = "silent";
  std::uint64_t period = 1;
  Height low = 0;
  Height high = 0;
  std::uint64_t periods = 0;
  std::uint64_t start = 0;
  Height cap = 0;
  std::vector<ProcessId> targets;
  std::string script;
  CLI::Option* high_opt = nullptr;
  CLI::Option* cap_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("--adversary", kind,
                    "silent | random_writes | oscillator | root_impersonator | replay");
    app->add_option("--adversary-period", period, "Ticks between oscillator flips");
    app->add_option("--adversary-low", low, "Oscillator low height");
    high_opt = app->add_option("--adversary-high", high, "Oscillator high height (default: cap)");
    app->add_option("--adversary-periods", periods, "Oscillator cycles, 0 = unbounded");
    app->add_option("--adversary-start", start, "First tick the adversary acts");
    app->add_option("--adversary-targets", targets, "Byzantine ids the adversary drives");
    app->add_option("--adversary-script", script, "Trace whose Byzantine writes are replayed");
    cap_opt = app->add_option("--height-cap", cap, "Cap on Byzantine heights (default 2n)");
  }

  AdversaryStrategy strategy(std::uint64_t seed) const {
    AdversaryStrategy s;
    s.kind = parse_adversary_kind(kind);
    s.period = period;
    s.low = low;
    if (high_opt->count()) s.high = high;
    s.periods = periods;
    s.start = start;
    if (cap_opt->count()) s.height_cap = cap;
    s.targets = targets;
    s.seed = seed;
    if (s.kind == AdversaryKind::replay) {
      if (script.empty()) throw UsageError("--adversary replay needs --adversary-script");
      ExecutionTrace t = parse_trace(read_file(script));
      for (const auto& step : t.steps)
        for (const auto& w : step.writes) s.script.push_back({step.tick, w});
    } else if (!script.empty()) {
      throw UsageError("--adversary-script only applies to --adversary replay");
    }
    return s;
  }
};

struct InitFlags {
  std::string mode = "random";
  std::string file;
  Height cap = 3;

  void add(CLI::App* app) {
    app->add_option("--init", mode, "random | legitimate | file");
    app->add_option("--init-file", file, "Initial configuration file");
    app->add_option("--init-cap", cap, "Height cap for random initial configurations");
  }

  Configuration make(const Topology& topo, std::uint64_t seed) const {
    if (mode == "random") return random_configuration(topo, cap, seed);
    if (mode == "legitimate") return legitimate_configuration(topo);
    if (mode == "file") {
      if (file.empty()) throw UsageError("--init file needs --init-file");
      Configuration c = parse_configuration(read_file(file));
      check_configuration(c, topo);
      return c;
    }
    throw UsageError("unknown --init mode '" + mode + "'");
  }
};

ContainmentParams params_for(const Topology& topo, const std::string& text) {
  ContainmentParams base = tree_protocol_params(topo);
  return text.empty() ? base : parse_params(text, base);
}

void print_verdicts(std::ostream& out, const std::vector<VerdictRecord>& verdicts) {
  auto num = [](const std::optional<std::uint64_t>& v) {
    return v ? std::to_string(*v) : std::string("-");
  };
  for (const auto& v : verdicts)
    out << v.name << ": " << to_string(v.status) << " (measured " << num(v.measured) << ", bound "
        << num(v.bound) << ")\n";
}

Json optional_json(const std::optional<std::uint64_t>& v) {
  return v ? Json(*v) : Json(nullptr);
}

// ---------------------------------------------------------------- run

struct RunOutcome {
  std::uint64_t seed = 0;
  ExecutionTrace trace;
  ContainmentReport report;
  StopReason stop = StopReason::quiescent;
};

int cmd_run(const TopologySource& src, const std::string& protocol_id, const ScheduleFlags& sched,
            const AdversaryFlags& adv, const InitFlags& init, std::uint64_t seed,
            std::uint64_t steps, const std::string& params_text, double slack,
            std::uint32_t snapshot_every, std::uint32_t runs, std::uint32_t jobs,
            const std::string& trace_out, const std::string& report_out,
            const std::string& csv_out, std::ostream& out) {
  const Topology topo = src.load();
  const Protocol protocol = make_protocol(protocol_id);
  const ContainmentParams params = params_for(topo, params_text);
  if (runs == 0) throw UsageError("--runs must be positive");
  // Validate every flag once before fanning out.
  Scheduler(sched.policy(seed), topo.process_count);
  Adversary(adv.strategy(seed), topo);
  init.make(topo, seed);

  std::vector<RunOutcome> outcomes(runs);
  auto one = [&](std::uint32_t r) {
    const std::uint64_t s = seed + r;
    Simulator sim(topo, protocol, init.make(topo, s),
                  Scheduler(sched.policy(s), topo.process_count), Adversary(adv.strategy(s), topo),
                  snapshot_every);
    RunOutcome& o = outcomes[r];
    o.seed = s;
    o.stop = sim.run(steps);
    o.trace = sim.trace();
    o.report = containment_report(o.trace, topo, protocol, params, slack);
  };
  const std::uint32_t workers = std::max<std::uint32_t>(1, std::min(jobs, runs));
  if (workers == 1) {
    for (std::uint32_t r = 0; r < runs; ++r) one(r);
  } else {
    std::mutex m;
    std::uint32_t next = 0;
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    for (std::uint32_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        while (true) {
          std::uint32_t r;
          {
            std::lock_guard<std::mutex> lock(m);
            if (next >= runs || failure) return;
            r = next++;
          }
          try {
            one(r);
          } catch (...) {
            std::lock_guard<std::mutex> lock(m);
            failure = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<VerdictRecord> all;
  if (runs == 1) {
    const auto& o = outcomes.front();
    write_file(trace_out, serialize_trace(o.trace));
    write_file(report_out, report_to_json(o.report));
    write_file(csv_out, verdicts_to_csv(o.report.verdicts));
    out << "steps: " << o.trace.steps.size()
        << (o.stop == StopReason::quiescent ? " (quiescent)\n" : " (step limit)\n");
    print_verdicts(out, o.report.verdicts);
    all = o.report.verdicts;
  } else {
    Json j;
    j["schema"] = "sstab-runs/1";
    j["runs"] = Json::array();
    std::string csv = "run,seed," + verdicts_to_csv({}).substr(0, verdicts_to_csv({}).find('\n'));
    csv += "\n";
    for (std::uint32_t r = 0; r < runs; ++r) {
      const auto& o = outcomes[r];
      if (!trace_out.empty())
        write_file(trace_out + "." + std::to_string(r), serialize_trace(o.trace));
      Json rj = Json::parse(report_to_json(o.report));
      rj["seed"] = o.seed;
      j["runs"].push_back(rj);
      std::istringstream lines(verdicts_to_csv(o.report.verdicts));
      std::string line;
      std::getline(lines, line);  // header
      while (std::getline(lines, line))
        csv += std::to_string(r) + "," + std::to_string(o.seed) + "," + line + "\n";
      out << "run " << r << " seed " << o.seed << ": " << to_string(o.report.overall())
          << " steps=" << o.trace.steps.size() << " stabilization_steps="
          << (o.report.stabilization_steps ? std::to_string(*o.report.stabilization_steps) : "-")
          << "\n";
      all.insert(all.end(), o.report.verdicts.begin(), o.report.verdicts.end());
    }
    j["overall"] = to_string(combine(all));
    write_file(report_out, j.dump(2) + "\n");
    write_file(csv_out, csv);
  }
  Verdict overall = combine(all);
  out << "overall: " << to_string(overall) << "\n";
  return exit_code(overall);
}

// ---------------------------------------------------------------- explore

int cmd_explore(const TopologySource& src, const std::string& protocol_id,
                const ScheduleFlags& sched, bool scheduler_given, const std::string& class_text,
                const ExplorationBudget& budget, bool certify, const std::string& start_file,
                const std::string& params_text, const std::string& trace_out,
                const std::string& report_out, std::ostream& out) {
  if (scheduler_given && parse_scheduler_kind(sched.scheduler) == SchedulerKind::random_fair)
    throw UsageError("explore enumerates every schedule; --scheduler random_fair is not allowed");
  const Topology topo = src.load();
  const Protocol protocol = make_protocol(protocol_id);
  const AdversaryClass cls = parse_adversary_class(class_text);

  Json j;
  Verdict verdict;
  if (certify) {
    const ContainmentParams params = params_for(topo, params_text);
    std::vector<Configuration> starts;
    if (!start_file.empty()) {
      Configuration c = parse_configuration(read_file(start_file));
      check_configuration(c, topo);
      starts.push_back(c);
    } else {
      starts = legitimate_stable_configurations(topo, protocol, budget.initial_height_cap);
      if (starts.empty()) throw UsageError("no legitimate and stable configuration under the cap");
    }
    auto cert = certify_temporal_containment(topo, protocol, starts, params, cls, budget);
    j["schema"] = "sstab-certificate/1";
    j["protocol"] = protocol.id;
    j["topology_digest"] = hex64(topology_digest(topo));
    j["adversary_class"] = describe(cls);
    j["params"] = {{"c", params.c}, {"f", params.f}, {"t", params.t}, {"k", params.k}};
    j["status"] = to_string(cert.status);
    j["reason"] = cert.reason;
    j["max_perturbations"] = optional_json(cert.max_perturbations);
    Json changes = Json::object();
    for (const auto& [v, n] : cert.max_changes) changes[std::to_string(v)] = optional_json(n);
    j["max_changes"] = changes;
    j["states"] = cert.states;
    j["coverage"] = cert.coverage;
    if (cert.counterexample) write_file(trace_out, serialize_trace(*cert.counterexample));
    verdict = cert.status;
  } else {
    ExploreOptions options;
    if (!start_file.empty()) {
      Configuration c = parse_configuration(read_file(start_file));
      check_configuration(c, topo);
      options.starts = std::vector<Configuration>{c};
    }
    auto r = explore(topo, protocol, cls, budget, options);
    j["schema"] = "sstab-explore/1";
    j["protocol"] = protocol.id;
    j["topology_digest"] = hex64(topology_digest(topo));
    j["adversary_class"] = describe(cls);
    j["fairness_bound"] = budget.fairness_bound;
    j["daemon"] = to_string(budget.daemon);
    j["exhaustive"] = r.exhaustive;
    j["converged"] = r.converged;
    j["failure"] = r.failure;
    Json actions = Json::object();
    for (ProcessId v = 0; v < topo.process_count; ++v)
      if (topo.is_correct(v)) actions[std::to_string(v)] = optional_json(r.max_actions[v]);
    j["max_actions"] = actions;
    j["longest_execution"] = optional_json(r.longest_execution);
    j["max_stabilization_steps"] = optional_json(r.max_stabilization_steps);
    j["max_correct_height"] = r.max_correct_height;
    j["states"] = r.states;
    j["start_configurations"] = r.start_configurations;
    j["coverage"] = r.coverage;
    if (r.witness) write_file(trace_out, serialize_trace(*r.witness));
    verdict = !r.exhaustive ? Verdict::indeterminate : r.converged ? Verdict::pass : Verdict::fail;
  }
  const std::string text = j.dump(2) + "\n";
  write_file(report_out, text);
  out << text;
  return exit_code(verdict);
}

// ---------------------------------------------------------------- demo-greedy

ProcessId farthest_correct(const Topology& topo) {
  auto dist = bfs_distances(topo, {topo.root}, true);
  ProcessId far = topo.root;
  for (ProcessId v = 0; v < topo.process_count; ++v)
    if (topo.is_correct(v) && dist[v] != kUnreachable && dist[v] >= dist[far]) far = v;
  return far;
}

struct DemoLeg {
  std::uint64_t attack_start = 0;
  std::vector<std::uint64_t> cumulative;  // per period, at the far process
  std::uint64_t total = 0;
  std::uint64_t steps = 0;
  bool settled = true;
  Configuration quiescent;
};

DemoLeg demo_leg(const Topology& topo, const Protocol& protocol, const ScheduleFlags& sched,
                 const Configuration& initial, std::uint64_t seed, std::uint64_t periods,
                 std::uint64_t period, Height low, Height high, std::uint64_t max_steps,
                 ProcessId far, const std::string& trace_out) {
  AdversaryStrategy silent;
  Simulator sim(topo, protocol, initial, Scheduler(sched.policy(seed), topo.process_count),
                Adversary(silent, topo));
  DemoLeg leg;
  if (sim.run_until_quiescent(max_steps) != StopReason::quiescent)
    throw UsageError(protocol.id + " did not reach quiescence within the step limit");
  leg.quiescent = sim.config();
  leg.attack_start = sim.current_tick();
  leg.cumulative.assign(periods, 0);
  if (periods > 0) {
    AdversaryStrategy osc;
    osc.kind = AdversaryKind::oscillator;
    osc.period = period;
    osc.low = low;
    osc.high = high;
    osc.periods = periods;
    osc.start = leg.attack_start;
    osc.height_cap = std::max(low, high);
    osc.seed = seed;
    sim.set_adversary(Adversary(osc, topo));
    leg.settled = sim.run(max_steps) == StopReason::quiescent;
  }
  ExecutionTrace trace = sim.trace();
  leg.steps = trace.steps.size();
  const std::uint64_t cycle = 2 * period;
  for (const auto& step : trace.steps) {
    if (step.tick < leg.attack_start || periods == 0) continue;
    if (!std::binary_search(step.changed.begin(), step.changed.end(), far)) continue;
    std::uint64_t idx = std::min<std::uint64_t>((step.tick - leg.attack_start) / cycle, periods - 1);
    for (std::uint64_t i = idx; i < periods; ++i) ++leg.cumulative[i];
    ++leg.total;
  }
  write_file(trace_out, serialize_trace(trace));
  return leg;
}

int cmd_demo(const TopologySource& src, const ScheduleFlags& sched, const InitFlags& init,
             std::uint64_t seed, std::uint64_t periods, std::uint64_t period, Height low,
             std::optional<Height> high_flag, std::uint64_t max_steps, std::size_t max_configs,
             const std::string& trace_prefix, const std::string& report_out,
             const std::string& csv_out, std::ostream& out) {
  const Topology topo = src.load();
  if (topo.byzantine.empty()) throw UsageError("demo-greedy needs a Byzantine process");
  if (period == 0) throw UsageError("--adversary-period must be positive");
  const Height high = high_flag.value_or(default_height_cap(topo));
  const ProcessId far = farthest_correct(topo);
  const Configuration initial = init.make(topo, seed);
  auto trace_path = [&](const std::string& id) {
    return trace_prefix.empty() ? std::string() : trace_prefix + "." + id + ".trace";
  };
  const Protocol cafs = cafs_protocol();
  const Protocol greedy = greedy_protocol();
  DemoLeg a = demo_leg(topo, cafs, sched, initial, seed, periods, period, low, high, max_steps,
                       far, trace_path("cafs"));
  DemoLeg g = demo_leg(topo, greedy, sched, initial, seed, periods, period, low, high, max_steps,
                       far, trace_path("greedy"));

  ExplorationBudget budget;
  budget.height_cap = std::max(low, high);
  budget.initial_height_cap = 0;
  budget.fairness_bound = sched.bound;
  budget.daemon = parse_daemon_mode(sched.daemon);
  budget.max_configurations = max_configs;
  const ContainmentParams params = tree_protocol_params(topo);
  ContainmentCertificate cert;
  try {
    cert = certify_temporal_containment(topo, cafs, {a.quiescent}, params,
                                        AdversaryClass::oscillator(low, high), budget);
  } catch (const ExplorationError& e) {
    cert.status = Verdict::indeterminate;
    cert.reason = e.what();
  }
  std::optional<std::uint64_t> certified_far;
  if (cert.status != Verdict::indeterminate) certified_far = cert.max_changes[far];

  std::vector<VerdictRecord> verdicts;
  verdicts.push_back({"greedy_far_changes", g.total, periods,
                      g.total >= periods ? Verdict::pass : Verdict::fail, "witnessed",
                      "must reach the number of oscillation periods"});
  Verdict cv = Verdict::indeterminate;
  std::string note = "bound is the certified change count of the far process";
  if (cert.status == Verdict::indeterminate) {
    note = "certification indeterminate: " + cert.reason;
  } else if (!certified_far) {
    cv = Verdict::fail;
    note = "certification found unbounded changes: " + cert.reason;
  } else {
    cv = a.total <= *certified_far ? Verdict::pass : Verdict::fail;
  }
  verdicts.push_back({"cafs_far_changes", a.total, certified_far, cv, "certified", note});

  Json j;
  j["schema"] = "sstab-demo/1";
  j["topology_digest"] = hex64(topology_digest(topo));
  j["far_process"] = far;
  j["periods"] = periods;
  j["ticks_per_flip"] = period;
  j["low"] = low;
  j["high"] = high;
  j["seed"] = seed;
  j["scheduler"] = Scheduler(sched.policy(seed), topo.process_count).describe();
  auto leg_json = [](const DemoLeg& leg) {
    Json l;
    l["attack_start_tick"] = leg.attack_start;
    l["per_period_cumulative"] = leg.cumulative;
    l["far_changes"] = leg.total;
    l["steps"] = leg.steps;
    l["settled"] = leg.settled;
    return l;
  };
  j["protocols"] = {{"cafs", leg_json(a)}, {"greedy", leg_json(g)}};
  Json cj;
  cj["status"] = to_string(cert.status);
  cj["reason"] = cert.reason;
  cj["certified_changes_far"] = optional_json(certified_far);
  cj["certified_changes_max"] = optional_json(cert.status == Verdict::indeterminate
                                                  ? std::nullopt
                                                  : cert.worst_changes());
  cj["k"] = params.k;
  cj["states"] = cert.states;
  cj["coverage"] = cert.coverage;
  j["cafs_certificate"] = cj;
  Json vj = Json::array();
  for (const auto& v : verdicts)
    vj.push_back({{"name", v.name},
                  {"measured", optional_json(v.measured)},
                  {"bound", optional_json(v.bound)},
                  {"status", to_string(v.status)},
                  {"note", v.note}});
  j["verdicts"] = vj;
  write_file(report_out, j.dump(2) + "\n");

  std::string csv = "period,cafs_cumulative,greedy_cumulative\n";
  for (std::uint64_t i = 0; i < periods; ++i)
    csv += std::to_string(i + 1) + "," + std::to_string(a.cumulative[i]) + "," +
           std::to_string(g.cumulative[i]) + "\n";
  write_file(csv_out, csv);

  out << "far process " << far << ", " << periods << " periods\n";
  out << "cafs far changes: " << a.total << "\ngreedy far changes: " << g.total << "\n";
  print_verdicts(out, verdicts);
  Verdict overall = combine(verdicts);
  out << "overall: " << to_string(overall) << "\n";
  return exit_code(overall);
}

// ---------------------------------------------------------------- report

int cmd_report(const TopologySource& src, const std::string& trace_file,
               const std::string& protocol_id, const std::string& params_text, double slack,
               const std::string& report_out, const std::string& csv_out, std::ostream& out) {
  const Topology topo = src.load();
  const ExecutionTrace trace = parse_trace(read_file(trace_file));
  const Protocol protocol = make_protocol(protocol_id.empty() ? trace.header.protocol : protocol_id);
  const ContainmentParams params = params_for(topo, params_text);
  ContainmentReport report;
  try {
    report = containment_report(trace, topo, protocol, params, slack);
  } catch (const TraceError& e) {
    throw TopologyInputError(e.what());
  }
  write_file(report_out, report_to_json(report));
  write_file(csv_out, verdicts_to_csv(report.verdicts));
  print_verdicts(out, report.verdicts);
  out << "overall: " << to_string(report.overall()) << "\n";
  return exit_code(report.overall());
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator and verifier for self-stabilizing protocols under Byzantine faults",
               "sstab"};
  app.require_subcommand(1);

  // run
  CLI::App* run = app.add_subcommand("run", "Simulate one execution (or --runs seeds)");
  TopologySource run_src;
  ScheduleFlags run_sched;
  AdversaryFlags run_adv;
  InitFlags run_init;
  std::string run_protocol = "cafs", run_params, run_trace, run_report, run_csv;
  std::uint64_t run_seed = 0, run_steps = 100000;
  double run_slack = 4.0;
  std::uint32_t run_snapshot = 32, run_runs = 1, run_jobs = 1;
  run_src.add(run);
  run_sched.add(run);
  run_adv.add(run);
  run_init.add(run);
  run->add_option("--protocol", run_protocol, "cafs | greedy");
  run->add_option("--seed", run_seed, "Seed for initial state, scheduler and adversary");
  run->add_option("--steps", run_steps, "Maximum recorded steps");
  run->add_option("--params", run_params, "Containment parameters, e.g. t=6,k=2,c=0");
  run->add_option("--slack", run_slack, "Constant in the stabilization-step bound");
  run->add_option("--snapshot-every", run_snapshot, "Snapshot period in the trace");
  run->add_option("--runs", run_runs, "Independent runs with seeds seed, seed+1, ...");
  run->add_option("--jobs", run_jobs, "Parallel workers for --runs");
  run->add_option("--trace-out", run_trace, "Trace file");
  run->add_option("--report-out", run_report, "JSON report file");
  run->add_option("--csv-out", run_csv, "CSV verdict file");

  // explore
  CLI::App* exp = app.add_subcommand("explore", "Exhaustive bounded-fair exploration");
  TopologySource exp_src;
  ScheduleFlags exp_sched;
  std::string exp_protocol = "cafs", exp_class = "silent", exp_start, exp_params, exp_trace,
              exp_report;
  ExplorationBudget exp_budget;
  bool exp_certify = false;
  exp_src.add(exp);
  CLI::Option* exp_sched_opt =
      exp->add_option("--scheduler", exp_sched.scheduler, "Only enumerating policies are allowed");
  exp->add_option("--daemon", exp_sched.daemon, "central | distributed");
  exp->add_option("--fairness-bound", exp_budget.fairness_bound, "B; 0 = unconstrained");
  exp->add_option("--protocol", exp_protocol, "cafs | greedy");
  exp->add_option("--adversary-class", exp_class,
                  "silent | full | oscillator[:low:high] | sampled[:count[:seed]]");
  exp->add_option("--height-cap", exp_budget.height_cap, "Cap on Byzantine writes");
  exp->add_option("--init-cap", exp_budget.initial_height_cap, "Cap on enumerated initial heights");
  exp->add_option("--max-configurations", exp_budget.max_configurations, "Search node budget");
  exp->add_option("--max-depth", exp_budget.max_depth, "Search depth budget");
  exp->add_flag("--allow-large-full", exp_budget.allow_large_full_adversary,
                "Allow the full adversary class beyond n <= 4, cap <= 3");
  exp->add_flag("--certify", exp_certify, "Certify temporal containment instead");
  exp->add_option("--start", exp_start, "Start configuration file");
  exp->add_option("--params", exp_params, "Containment parameters for --certify");
  exp->add_option("--trace-out", exp_trace, "Witness or counterexample trace file");
  exp->add_option("--report-out", exp_report, "JSON summary file");

  // demo-greedy
  CLI::App* demo = app.add_subcommand("demo-greedy", "CAFS versus greedy under an oscillator");
  TopologySource demo_src;
  demo_src.fallback = "line:6:byz=5";
  ScheduleFlags demo_sched;
  InitFlags demo_init;
  std::uint64_t demo_seed = 0, demo_periods = 10, demo_period = 4, demo_steps = 1000000;
  Height demo_low = 0, demo_high = 0;
  std::size_t demo_configs = 4'000'000;
  std::string demo_trace, demo_report, demo_csv;
  demo_src.add(demo);
  demo_sched.add(demo);
  demo_init.add(demo);
  demo->add_option("--seed", demo_seed, "Seed shared by both protocols");
  demo->add_option("--periods", demo_periods, "Oscillation periods P");
  demo->add_option("--adversary-period", demo_period, "Ticks between oscillator flips");
  demo->add_option("--adversary-low", demo_low, "Oscillator low height");
  CLI::Option* demo_high_opt =
      demo->add_option("--adversary-high", demo_high, "Oscillator high height (default 2n)");
  demo->add_option("--steps", demo_steps, "Maximum recorded steps per protocol");
  demo->add_option("--max-configurations", demo_configs, "Certification node budget");
  demo->add_option("--trace-prefix", demo_trace, "Write <prefix>.cafs.trace and .greedy.trace");
  demo->add_option("--report-out", demo_report, "JSON paired report");
  demo->add_option("--csv-out", demo_csv, "CSV per-period counts");

  // report
  CLI::App* rep = app.add_subcommand("report", "Replay a trace and emit the containment report");
  TopologySource rep_src;
  std::string rep_trace, rep_protocol, rep_params, rep_report, rep_csv;
  double rep_slack = 4.0;
  rep_src.add(rep);
  rep->add_option("--trace", rep_trace, "Trace file")->required();
  rep->add_option("--protocol", rep_protocol, "Defaults to the trace header");
  rep->add_option("--params", rep_params, "Containment parameters");
  rep->add_option("--slack", rep_slack, "Constant in the stabilization-step bound");
  rep->add_option("--report-out", rep_report, "JSON report file");
  rep->add_option("--csv-out", rep_csv, "CSV verdict file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      if (app.got_subcommand(run)) out << run->help();
      return 0;
    }
    err << "sstab: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*run)
      return cmd_run(run_src, run_protocol, run_sched, run_adv, run_init, run_seed, run_steps,
                     run_params, run_slack, run_snapshot, run_runs, run_jobs, run_trace,
                     run_report, run_csv, out);
    if (*exp) {
      exp_budget.daemon = parse_daemon_mode(exp_sched.daemon);
      return cmd_explore(exp_src, exp_protocol, exp_sched, exp_sched_opt->count() > 0, exp_class,
                         exp_budget, exp_certify, exp_start, exp_params, exp_trace, exp_report,
                         out);
    }
    if (*demo)
      return cmd_demo(demo_src, demo_sched, demo_init, demo_seed, demo_periods, demo_period,
                      demo_low,
                      demo_high_opt->count() ? std::optional<Height>(demo_high) : std::nullopt,
                      demo_steps, demo_configs, demo_trace, demo_report, demo_csv, out);
    if (*rep)
      return cmd_report(rep_src, rep_trace, rep_protocol, rep_params, rep_slack, rep_report,
                        rep_csv, out);
  } catch (const TopologyInputError& e) {
    err << "sstab: invalid topology: " << e.what() << "\n";
    return kExitTopology;
  } catch (const UsageError& e) {
    err << "sstab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "sstab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "sstab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ModelError& e) {
    err << "sstab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ExplorationError& e) {
    err << "sstab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "sstab: internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}

}  // namespace sstab
