// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sstab/trace_store.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "sstab/digest.hpp"

namespace sstab {

std::vector<ProcessId> changed_processes(const Configuration& before, const Configuration& after) {
  std::vector<ProcessId> out;
  for (ProcessId v = 0; v < before.size() && v < after.size(); ++v)
    if (!same_s_variables(before[v], after[v])) out.push_back(v);
  return out;
}

TraceHeader make_header(const Topology& topo, const Protocol& protocol, std::string scheduler,
                        std::string adversary, std::uint32_t snapshot_every) {
  TraceHeader h;
  h.topology_digest = topology_digest(topo);
  h.process_count = topo.process_count;
  h.protocol = protocol.id;
  h.scheduler = std::move(scheduler);
  h.adversary = std::move(adversary);
  h.snapshot_every = snapshot_every == 0 ? 1 : snapshot_every;
  return h;
}

TraceRecorder::TraceRecorder(TraceHeader header, const Topology& topo, const Protocol& protocol,
                             Configuration initial)
    : topo_(&topo), protocol_(&protocol), current_(initial) {
  check_configuration(initial, topo);
  if (header.snapshot_every == 0) header.snapshot_every = 1;
  trace_.header = std::move(header);
  trace_.initial = std::move(initial);
}

const TraceStep& TraceRecorder::append(std::uint64_t tick, std::vector<ProcessId> selected,
                                       std::vector<ByzantineWrite> writes,
                                       const Configuration& result) {
  std::sort(selected.begin(), selected.end());
  std::sort(writes.begin(), writes.end(),
            [](const ByzantineWrite& a, const ByzantineWrite& b) { return a.process < b.process; });
  const std::uint64_t index = trace_.steps.size();
  if (selected.empty() && writes.empty())
    throw TraceError("step " + std::to_string(index) + " is empty");
  if (!trace_.steps.empty() && tick < trace_.steps.back().tick)
    throw TraceError("step " + std::to_string(index) + " goes back in time");

  Configuration expected;
  try {
    expected = apply_step(current_, *topo_, *protocol_, selected, writes);
  } catch (const ModelError& e) {
    throw TraceError("inconsistent stream at step " + std::to_string(index) + ": " + e.what());
  }
  if (!(expected == result))
    throw TraceError("inconsistent stream at step " + std::to_string(index) +
                     ": configuration does not follow from the step");

  TraceStep step;
  step.index = index;
  step.tick = tick;
  step.selected = std::move(selected);
  step.writes = std::move(writes);
  step.changed = changed_processes(current_, result);
  step.digest = configuration_digest(result);
  const bool periodic = (index + 1) % trace_.header.snapshot_every == 0;
  const bool quiescent = activable_correct(*protocol_, result, *topo_).empty();
  if (periodic || quiescent) step.snapshot = result;
  current_ = result;
  trace_.steps.push_back(std::move(step));
  return trace_.steps.back();
}

ExecutionTrace TraceRecorder::seal() const {
  ExecutionTrace out = trace_;
  if (!out.steps.empty() && !out.steps.back().snapshot) out.steps.back().snapshot = current_;
  return out;
}

namespace {

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  if (items.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

std::string format_write(const ByzantineWrite& w) {
  return std::to_string(w.process) + ":" +
         (w.state.parent ? std::to_string(*w.state.parent) : std::string("NIL")) + ":" +
         std::to_string(w.state.height);
}

std::optional<std::uint64_t> to_uint(std::string_view s, int base = 10) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

std::string serialize_trace(const ExecutionTrace& trace) {
  std::ostringstream os;
  const auto& h = trace.header;
  os << "sstab-trace 1\n";
  os << "topology " << hex64(h.topology_digest) << "\n";
  os << "processes " << h.process_count << "\n";
  os << "protocol " << h.protocol << "\n";
  os << "scheduler " << h.scheduler << "\n";
  os << "adversary " << h.adversary << "\n";
  os << "snapshot-every " << h.snapshot_every << "\n";
  os << "initial\n" << serialize_configuration(trace.initial) << "end\n";
  for (const auto& s : trace.steps) {
    os << "step " << s.index << " tick " << s.tick << " selected "
       << join(s.selected, [](ProcessId v) { return std::to_string(v); }) << " writes "
       << join(s.writes, format_write) << " changed "
       << join(s.changed, [](ProcessId v) { return std::to_string(v); }) << " digest "
       << hex64(s.digest) << "\n";
    if (s.snapshot) os << "snapshot\n" << serialize_configuration(*s.snapshot) << "end\n";
  }
  return os.str();
}

ExecutionTrace parse_trace(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::size_t i = 0;
  auto expect_field = [&](std::string_view key) -> std::string {
    if (i >= lines.size()) throw ParseError(i + 1, "missing '" + std::string(key) + "'");
    auto line = lines[i];
    if (line.substr(0, key.size()) != key ||
        (line.size() > key.size() && line[key.size()] != ' '))
      throw ParseError(i + 1, "expected '" + std::string(key) + "'");
    ++i;
    return line.size() > key.size() ? std::string(line.substr(key.size() + 1)) : std::string();
  };
  auto read_block = [&]() -> Configuration {
    std::size_t start = i;
    std::string body;
    while (i < lines.size() && lines[i] != "end") {
      body += lines[i];
      body += '\n';
      ++i;
    }
    if (i >= lines.size()) throw ParseError(i, "unterminated configuration block");
    ++i;  // end
    return parse_configuration(body, start + 1);
  };

  ExecutionTrace trace;
  if (expect_field("sstab-trace") != "1") throw ParseError(1, "unsupported trace version");
  auto digest = to_uint(expect_field("topology"), 16);
  if (!digest) throw ParseError(i, "bad topology digest");
  trace.header.topology_digest = *digest;
  auto n = to_uint(expect_field("processes"));
  if (!n) throw ParseError(i, "bad process count");
  trace.header.process_count = *n;
  trace.header.protocol = expect_field("protocol");
  trace.header.scheduler = expect_field("scheduler");
  trace.header.adversary = expect_field("adversary");
  auto every = to_uint(expect_field("snapshot-every"));
  if (!every || *every == 0 || *every > UINT32_MAX) throw ParseError(i, "bad snapshot-every");
  trace.header.snapshot_every = static_cast<std::uint32_t>(*every);
  expect_field("initial");
  trace.initial = read_block();
  if (trace.initial.size() != trace.header.process_count)
    throw ParseError(i, "initial configuration size does not match process count");

  auto parse_ids = [&](std::string_view s) {
    std::vector<ProcessId> out;
    if (s == "-") return out;
    for (auto tok : split(s, ',')) {
      auto v = to_uint(tok);
      if (!v || *v >= trace.header.process_count) throw ParseError(i, "bad process id list");
      out.push_back(static_cast<ProcessId>(*v));
    }
    return out;
  };
  auto parse_writes = [&](std::string_view s) {
    std::vector<ByzantineWrite> out;
    if (s == "-") return out;
    for (auto tok : split(s, ',')) {
      auto parts = split(tok, ':');
      if (parts.size() != 3) throw ParseError(i, "bad write '" + std::string(tok) + "'");
      auto id = to_uint(parts[0]);
      auto h = to_uint(parts[2]);
      if (!id || !h || *id >= trace.header.process_count) throw ParseError(i, "bad write");
      ByzantineWrite w;
      w.process = static_cast<ProcessId>(*id);
      w.state.height = *h;
      if (parts[1] != "NIL") {
        auto c = to_uint(parts[1]);
        if (!c || *c > UINT32_MAX) throw ParseError(i, "bad write channel");
        w.state.parent = static_cast<Channel>(*c);
      }
      out.push_back(w);
    }
    return out;
  };

  while (i < lines.size()) {
    std::istringstream ls{std::string(lines[i])};
    std::string k_step, k_tick, k_sel, k_writes, k_changed, k_digest, extra;
    std::string v_step, v_tick, v_sel, v_writes, v_changed, v_digest;
    if (!(ls >> k_step >> v_step >> k_tick >> v_tick >> k_sel >> v_sel >> k_writes >> v_writes >>
          k_changed >> v_changed >> k_digest >> v_digest) ||
        (ls >> extra) || k_step != "step" || k_tick != "tick" || k_sel != "selected" ||
        k_writes != "writes" || k_changed != "changed" || k_digest != "digest")
      throw ParseError(i + 1, "malformed step line");
    ++i;
    TraceStep step;
    auto idx = to_uint(v_step);
    auto tick = to_uint(v_tick);
    auto dg = to_uint(v_digest, 16);
    if (!idx || !tick || !dg || v_digest.size() != 16) throw ParseError(i, "bad step numbers");
    if (*idx != trace.steps.size()) throw ParseError(i, "step indices must be contiguous from 0");
    step.index = *idx;
    step.tick = *tick;
    step.selected = parse_ids(v_sel);
    step.writes = parse_writes(v_writes);
    step.changed = parse_ids(v_changed);
    step.digest = *dg;
    if (i < lines.size() && lines[i] == "snapshot") {
      ++i;
      step.snapshot = read_block();
    }
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

ReplayResult replay(const ExecutionTrace& trace, const Topology& topo, const Protocol& protocol) {
  const auto& h = trace.header;
  if (h.topology_digest != topology_digest(topo) || h.process_count != topo.process_count)
    throw TraceError("header mismatch: trace was recorded on a different topology");
  if (h.protocol != protocol.id)
    throw TraceError("header mismatch: trace protocol '" + h.protocol + "' vs '" + protocol.id +
                     "'");

  ReplayResult result;
  TraceRecorder recorder(h, topo, protocol, trace.initial);
  result.configurations.push_back(trace.initial);
  auto fail = [&](std::uint64_t step, std::string msg) {
    result.ok = false;
    result.failed_step = step;
    result.message = "step " + std::to_string(step) + ": " + std::move(msg);
  };

  for (const auto& s : trace.steps) {
    const Configuration& before = recorder.current();
    Configuration after;
    try {
      after = apply_step(before, topo, protocol, s.selected, s.writes);
    } catch (const ModelError& e) {
      fail(s.index, e.what());
      break;
    }
    if (configuration_digest(after) != s.digest) {
      fail(s.index, "digest mismatch");
      break;
    }
    if (changed_processes(before, after) != s.changed) {
      fail(s.index, "change flags disagree with the configuration diff");
      break;
    }
    if (s.snapshot && !(*s.snapshot == after)) {
      fail(s.index, "snapshot disagrees with the replayed configuration");
      break;
    }
    try {
      recorder.append(s.tick, s.selected, s.writes, after);
    } catch (const TraceError& e) {
      fail(s.index, e.what());
      break;
    }
    result.configurations.push_back(after);
  }
  result.final_config = recorder.current();
  result.rerecorded = recorder.seal();
  return result;
}

}  // namespace sstab
