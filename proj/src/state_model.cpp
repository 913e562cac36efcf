// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sstab/state_model.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "sstab/digest.hpp"

namespace sstab {

void check_configuration(const Configuration& config, const Topology& topo) {
  if (config.size() != topo.process_count)
    throw ModelError("configuration has " + std::to_string(config.size()) +
                     " processes, topology has " + std::to_string(topo.process_count));
}

LocalView local_view(const Configuration& config, const Topology& topo, ProcessId v) {
  if (v >= topo.process_count) throw ModelError("unknown process id " + std::to_string(v));
  check_configuration(config, topo);
  LocalView view;
  view.self = v;
  view.is_root = (v == topo.root);
  view.state = config[v];
  const auto& nv = topo.neighbors[v];
  view.neighbors.reserve(nv.size());
  view.neighbor_correct.reserve(nv.size());
  for (ProcessId u : nv) {
    view.neighbors.push_back(config[u]);
    view.neighbor_correct.push_back(topo.is_correct(u));
  }
  return view;
}

std::vector<std::size_t> enabled_rules(const Protocol& protocol, const Neighborhood& view) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < protocol.rules.size(); ++i)
    if (protocol.rules[i].guard(view)) out.push_back(i);
  return out;
}

std::optional<ProcessState> next_state(const Protocol& protocol, const Neighborhood& view) {
  for (const auto& rule : protocol.rules)
    if (rule.guard(view)) return rule.action(view);
  return std::nullopt;
}

bool is_activable(const Protocol& protocol, const Configuration& config, const Topology& topo,
                  ProcessId v) {
  auto view = local_view(config, topo, v);
  for (const auto& rule : protocol.rules)
    if (rule.guard(view)) return true;
  return false;
}

std::vector<ProcessId> activable_correct(const Protocol& protocol, const Configuration& config,
                                         const Topology& topo) {
  std::vector<ProcessId> out;
  for (ProcessId v = 0; v < topo.process_count; ++v)
    if (topo.is_correct(v) && is_activable(protocol, config, topo, v)) out.push_back(v);
  return out;
}

bool spec_holds(const Protocol& protocol, const Configuration& config, const Topology& topo,
                ProcessId v) {
  return protocol.spec(local_view(config, topo, v));
}

Configuration apply_step(const Configuration& config, const Topology& topo,
                         const Protocol& protocol, std::span<const ProcessId> selected,
                         std::span<const ByzantineWrite> writes) {
  check_configuration(config, topo);
  if (selected.empty() && writes.empty()) throw ModelError("empty step");

  std::vector<bool> touched(topo.process_count, false);
  Configuration next = config;
  for (ProcessId v : selected) {
    if (v >= topo.process_count) throw ModelError("unknown process id " + std::to_string(v));
    if (topo.is_byzantine(v))
      throw ModelError("Byzantine process " + std::to_string(v) + " cannot be selected");
    if (touched[v]) throw ModelError("process " + std::to_string(v) + " selected twice");
    touched[v] = true;
    auto ns = next_state(protocol, local_view(config, topo, v));
    if (!ns) throw ModelError("process " + std::to_string(v) + " is not activable");
    next[v] = *ns;
  }
  for (const auto& w : writes) {
    if (w.process >= topo.process_count)
      throw ModelError("unknown process id " + std::to_string(w.process));
    if (!topo.is_byzantine(w.process))
      throw ModelError("write targets correct process " + std::to_string(w.process));
    if (touched[w.process])
      throw ModelError("duplicate write for process " + std::to_string(w.process));
    touched[w.process] = true;
    next[w.process] = w.state;
  }
  return next;
}

std::string format_state(const ProcessState& s) {
  std::string out = "parent=";
  out += s.parent ? std::to_string(*s.parent) : "NIL";
  out += " height=";
  out += std::to_string(s.height);
  return out;
}

std::string serialize_configuration(const Configuration& config) {
  std::string out;
  for (std::size_t v = 0; v < config.size(); ++v) {
    out += std::to_string(v);
    out += ' ';
    out += format_state(config.states[v]);
    out += '\n';
  }
  return out;
}

namespace {

std::optional<std::uint64_t> to_uint(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

Configuration parse_configuration(std::string_view text, std::size_t first_line) {
  Configuration config;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t line_no = first_line - 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id_tok, parent_tok, height_tok, extra;
    if (!(ls >> id_tok >> parent_tok >> height_tok) || (ls >> extra))
      throw ParseError(line_no, "expected '<id> parent=<channel|NIL> height=<h>'");
    auto id = to_uint(id_tok);
    if (!id || *id != config.size())
      throw ParseError(line_no, "process ids must be contiguous from 0");
    ProcessState s;
    if (parent_tok.rfind("parent=", 0) != 0) throw ParseError(line_no, "expected parent=");
    auto pv = std::string_view(parent_tok).substr(7);
    if (pv != "NIL") {
      auto c = to_uint(pv);
      if (!c || *c > UINT32_MAX) throw ParseError(line_no, "bad parent channel");
      s.parent = static_cast<Channel>(*c);
    }
    if (height_tok.rfind("height=", 0) != 0) throw ParseError(line_no, "expected height=");
    auto h = to_uint(std::string_view(height_tok).substr(7));
    if (!h) throw ParseError(line_no, "bad height");
    s.height = *h;
    config.states.push_back(s);
  }
  return config;
}

std::uint64_t configuration_digest(const Configuration& config) {
  return fnv1a64(serialize_configuration(config));
}

}  // namespace sstab
