// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sstab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sstab {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "?";
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::pass: return 0;
    case Verdict::fail: return 2;
    case Verdict::indeterminate: return 3;
  }
  return 3;
}

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::indeterminate: return "indeterminate";
  }
  return "?";
}

bool is_c_legitimate(const Configuration& config, const Topology& topo, const Protocol& protocol,
                     std::uint64_t c) {
  for (ProcessId v : c_correct_set(topo, c))
    if (!spec_holds(protocol, config, topo, v)) return false;
  return true;
}

namespace {

std::vector<std::uint64_t> config_key(const Configuration& config) {
  std::vector<std::uint64_t> key;
  key.reserve(2 * config.size());
  for (const auto& s : config.states) {
    key.push_back(s.parent ? static_cast<std::uint64_t>(*s.parent) + 1 : 0);
    key.push_back(s.height);
  }
  return key;
}

}  // namespace

Stability is_c_stable(const Configuration& config, const Topology& topo, const Protocol& protocol,
                      std::uint64_t c, StabilityMethod method, std::size_t max_configurations) {
  if (method == StabilityMethod::automatic && c == 0 && protocol.actions_change_s_variables)
    return activable_correct(protocol, config, topo).empty() ? Stability::stable
                                                             : Stability::unstable;

  std::vector<bool> constrained(topo.process_count, false);
  for (ProcessId v : c_correct_set(topo, c)) constrained[v] = true;

  std::set<std::vector<std::uint64_t>> visited;
  std::deque<Configuration> frontier;
  visited.insert(config_key(config));
  frontier.push_back(config);
  constexpr std::size_t kMaxActivable = 16;

  while (!frontier.empty()) {
    Configuration cur = std::move(frontier.front());
    frontier.pop_front();
    std::vector<ProcessId> act;
    std::vector<ProcessState> moves;
    for (ProcessId v = 0; v < topo.process_count; ++v) {
      if (topo.is_byzantine(v)) continue;
      if (auto ns = next_state(protocol, local_view(cur, topo, v))) {
        if (constrained[v] && !same_s_variables(*ns, cur[v])) return Stability::unstable;
        act.push_back(v);
        moves.push_back(*ns);
      }
    }
    if (act.empty()) continue;
    if (act.size() > kMaxActivable) return Stability::indeterminate;
    // Every activable process was checked above, so any subset only moves
    // processes that are either unconstrained or keep their S-variables.
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << act.size()); ++mask) {
      Configuration next = cur;
      for (std::size_t i = 0; i < act.size(); ++i)
        if (mask >> i & 1) next[act[i]] = moves[i];
      if (visited.insert(config_key(next)).second) {
        if (visited.size() > max_configurations) return Stability::indeterminate;
        frontier.push_back(std::move(next));
      }
    }
  }
  return Stability::stable;
}

ContainmentParams tree_protocol_params(const Topology& topo) {
  auto m = graph_metrics(topo);
  ContainmentParams p;
  p.c = 0;
  p.f = m.n == 0 ? 0 : m.n - 1;
  p.k = saturating_pow(m.max_degree, m.correct_diameter);
  p.t = p.k > UINT64_MAX / std::max<std::uint64_t>(m.n, 1) ? UINT64_MAX : m.n * p.k;
  return p;
}

ContainmentParams parse_params(std::string_view text, ContainmentParams base) {
  std::string s(text);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value in '" + tok + "'");
    std::string key = tok.substr(0, eq);
    std::uint64_t val = 0;
    try {
      std::size_t used = 0;
      val = std::stoull(tok.substr(eq + 1), &used);
      if (used != tok.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad value in '" + tok + "'");
    }
    if (key == "c") base.c = val;
    else if (key == "f") base.f = val;
    else if (key == "t") base.t = val;
    else if (key == "k") base.k = val;
    else throw std::invalid_argument("unknown parameter '" + key + "'");
  }
  return base;
}

PerturbationScan perturbation_scan(const ExecutionTrace& trace,
                                   const std::vector<Configuration>& configs, const Topology& topo,
                                   const Protocol& protocol, std::uint64_t c) {
  if (configs.size() != trace.steps.size() + 1)
    throw std::invalid_argument("perturbation_scan: configurations do not match the trace");
  PerturbationScan scan;
  std::vector<bool> constrained(topo.process_count, false);
  for (ProcessId v : c_correct_set(topo, c)) constrained[v] = true;

  scan.legitimate_stable.resize(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    bool ok = is_c_legitimate(configs[i], topo, protocol, c);
    if (ok) {
      auto st = is_c_stable(configs[i], topo, protocol, c);
      if (st == Stability::indeterminate) scan.stability_indeterminate = true;
      ok = st == Stability::stable;
    }
    scan.legitimate_stable[i] = ok;
    if (ok && !scan.first_legitimate_stable) scan.first_legitimate_stable = i;
  }
  if (!scan.first_legitimate_stable) return scan;

  std::uint64_t segment_start = *scan.first_legitimate_stable;
  std::map<ProcessId, std::uint64_t> changes;
  for (std::size_t j = segment_start; j < trace.steps.size(); ++j) {
    for (ProcessId v : trace.steps[j].changed)
      if (constrained[v]) ++changes[v];
    if (scan.legitimate_stable[j + 1]) {
      if (!changes.empty())
        scan.intervals.push_back({segment_start, static_cast<std::uint64_t>(j + 1), changes});
      changes.clear();
      segment_start = j + 1;
    }
  }
  scan.open_interval = !changes.empty();
  return scan;
}

Verdict combine(const std::vector<VerdictRecord>& verdicts) {
  bool indeterminate = false;
  for (const auto& v : verdicts) {
    if (v.status == Verdict::fail) return Verdict::fail;
    if (v.status == Verdict::indeterminate) indeterminate = true;
  }
  return indeterminate ? Verdict::indeterminate : Verdict::pass;
}

Verdict ContainmentReport::overall() const { return combine(verdicts); }

const VerdictRecord* ContainmentReport::find(std::string_view name) const {
  for (const auto& v : verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

namespace {

Verdict at_most(std::uint64_t measured, std::uint64_t bound) {
  return measured <= bound ? Verdict::pass : Verdict::fail;
}

}  // namespace

ContainmentReport containment_report(const ExecutionTrace& trace,
                                     const std::vector<Configuration>& configs,
                                     const Topology& topo, const Protocol& protocol,
                                     const ContainmentParams& params, double slack) {
  ContainmentReport r;
  r.protocol = protocol.id;
  r.params = params;
  r.slack = slack;
  const auto metrics = graph_metrics(topo);

  r.verdicts.push_back({"byzantine_count", metrics.f, params.f, at_most(metrics.f, params.f),
                        "witnessed", ""});

  auto scan = perturbation_scan(trace, configs, topo, protocol, params.c);
  r.first_legitimate_stable = scan.first_legitimate_stable;
  r.perturbations = scan.intervals;
  r.open_interval = scan.open_interval;
  r.stabilized = scan.first_legitimate_stable.has_value();

  const double growth = static_cast<double>(metrics.n - metrics.f) *
                        static_cast<double>(saturating_pow(metrics.max_degree, metrics.correct_diameter));
  const double raw_bound = slack * growth;
  const std::uint64_t l_bound =
      raw_bound >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(std::floor(raw_bound));
  std::ostringstream slack_note;
  slack_note << "heuristic: slack C=" << slack << " times (n-f)*Delta^d";

  if (!r.stabilized) {
    r.verdicts.push_back({"stabilization_steps", std::nullopt, l_bound, Verdict::indeterminate,
                          "witnessed", "not stabilized within the trace"});
    r.verdicts.push_back({"perturbations", std::nullopt, params.t, Verdict::indeterminate,
                          "witnessed", "not stabilized within the trace"});
    r.verdicts.push_back({"max_changes_per_process", std::nullopt, params.k,
                          Verdict::indeterminate, "witnessed", "not stabilized within the trace"});
  } else {
    const std::uint64_t first = *scan.first_legitimate_stable;
    std::uint64_t l = 0;
    for (std::uint64_t j = 0; j < first; ++j)
      if (!trace.steps[j].selected.empty()) ++l;
    r.stabilization_steps = l;
    r.verdicts.push_back(
        {"stabilization_steps", l, l_bound, at_most(l, l_bound), "witnessed", slack_note.str()});

    const std::uint64_t count = scan.intervals.size();
    Verdict pv = at_most(count, params.t);
    std::string pnote;
    if (scan.open_interval) {
      pnote = "trace ends inside an unsettled disturbance";
      if (pv == Verdict::pass && count + 1 > params.t) pv = Verdict::indeterminate;
    }
    r.verdicts.push_back({"perturbations", count, params.t, pv, "witnessed", pnote});

    for (ProcessId v : c_correct_set(topo, params.c)) r.post_stabilization_changes[v] = 0;
    for (std::size_t j = first; j < trace.steps.size(); ++j)
      for (ProcessId v : trace.steps[j].changed)
        if (auto it = r.post_stabilization_changes.find(v); it != r.post_stabilization_changes.end())
          ++it->second;
    std::uint64_t worst = 0;
    ProcessId worst_id = 0;
    for (auto [v, n] : r.post_stabilization_changes)
      if (n > worst) {
        worst = n;
        worst_id = v;
      }
    r.verdicts.push_back({"max_changes_per_process", worst, params.k, at_most(worst, params.k),
                          "witnessed",
                          worst > 0 ? "worst process " + std::to_string(worst_id) : ""});
  }
  if (scan.stability_indeterminate)
    r.verdicts.push_back({"stability_classifier", std::nullopt, std::nullopt,
                          Verdict::indeterminate, "witnessed",
                          "stability closure exceeded its budget"});
  return r;
}

ContainmentReport containment_report(const ExecutionTrace& trace, const Topology& topo,
                                     const Protocol& protocol, const ContainmentParams& params,
                                     double slack) {
  auto rp = replay(trace, topo, protocol);
  if (!rp.ok) {
    ContainmentReport r;
    r.protocol = protocol.id;
    r.params = params;
    r.slack = slack;
    r.verdicts.push_back({"replay", rp.failed_step, std::nullopt, Verdict::fail, "witnessed",
                          rp.message});
    return r;
  }
  auto r = containment_report(trace, rp.configurations, topo, protocol, params, slack);
  r.verdicts.insert(r.verdicts.begin(),
                    VerdictRecord{"replay", std::nullopt, std::nullopt, Verdict::pass, "witnessed",
                                  "all digests match"});
  return r;
}

namespace {

nlohmann::json opt_json(const std::optional<std::uint64_t>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string report_to_json(const ContainmentReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "sstab-report/1";
  j["protocol"] = r.protocol;
  j["params"] = {{"c", r.params.c}, {"f", r.params.f}, {"t", r.params.t}, {"k", r.params.k}};
  j["slack"] = r.slack;
  j["stabilized"] = r.stabilized;
  j["stabilization_steps"] = opt_json(r.stabilization_steps);
  j["first_legitimate_stable"] = opt_json(r.first_legitimate_stable);
  auto intervals = nlohmann::ordered_json::array();
  for (const auto& p : r.perturbations) {
    nlohmann::ordered_json changes = nlohmann::ordered_json::object();
    for (auto [v, n] : p.changes) changes[std::to_string(v)] = n;
    intervals.push_back({{"start", p.start}, {"end", p.end}, {"changes", changes}});
  }
  j["perturbations"] = intervals;
  j["open_interval"] = r.open_interval;
  nlohmann::ordered_json post = nlohmann::ordered_json::object();
  for (auto [v, n] : r.post_stabilization_changes) post[std::to_string(v)] = n;
  j["post_stabilization_changes"] = post;
  auto verdicts = nlohmann::ordered_json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"name", v.name},
                        {"measured", opt_json(v.measured)},
                        {"bound", opt_json(v.bound)},
                        {"status", to_string(v.status)},
                        {"scope", v.scope},
                        {"note", v.note}});
  }
  j["verdicts"] = verdicts;
  j["overall"] = to_string(r.overall());
  return j.dump(2) + "\n";
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string verdicts_to_csv(const std::vector<VerdictRecord>& verdicts) {
  std::string out = "name,measured,bound,status,scope,note\n";
  for (const auto& v : verdicts) {
    out += csv_field(v.name) + ",";
    out += (v.measured ? std::to_string(*v.measured) : "") + ",";
    out += (v.bound ? std::to_string(*v.bound) : "") + ",";
    out += std::string(to_string(v.status)) + ",";
    out += csv_field(v.scope) + ",";
    out += csv_field(v.note) + "\n";
  }
  return out;
}

}  // namespace sstab
