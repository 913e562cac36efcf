// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sstab/topology.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "sstab/digest.hpp"

namespace sstab {

bool Topology::is_byzantine(ProcessId v) const {
  return std::binary_search(byzantine.begin(), byzantine.end(), v);
}

std::optional<Channel> Topology::channel_to(ProcessId v, ProcessId u) const {
  const auto& nv = neighbors.at(v);
  auto it = std::find(nv.begin(), nv.end(), u);
  if (it == nv.end()) return std::nullopt;
  return static_cast<Channel>(it - nv.begin());
}

std::vector<ProcessId> Topology::correct_processes() const {
  std::vector<ProcessId> out;
  for (ProcessId v = 0; v < process_count; ++v)
    if (!is_byzantine(v)) out.push_back(v);
  return out;
}

std::vector<std::uint32_t> bfs_distances(const Topology& topo,
                                         const std::vector<ProcessId>& sources,
                                         bool correct_only) {
  std::vector<std::uint32_t> dist(topo.process_count, kUnreachable);
  std::deque<ProcessId> queue;
  for (ProcessId s : sources) {
    if (s >= topo.process_count) continue;
    if (correct_only && topo.is_byzantine(s)) continue;
    if (dist[s] == 0) continue;
    dist[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    ProcessId v = queue.front();
    queue.pop_front();
    for (ProcessId u : topo.neighbors[v]) {
      if (u >= topo.process_count || dist[u] != kUnreachable) continue;
      if (correct_only && topo.is_byzantine(u)) continue;
      dist[u] = dist[v] + 1;
      queue.push_back(u);
    }
  }
  return dist;
}

ValidationReport validate(const Topology& topo) {
  ValidationReport report;
  auto add = [&](std::string kind, std::string message) {
    report.push_back({std::move(kind), std::move(message)});
  };
  const std::size_t n = topo.process_count;
  if (n == 0) {
    add("size", "topology has no processes");
    return report;
  }
  if (topo.neighbors.size() != n) {
    add("size", "neighbor table has " + std::to_string(topo.neighbors.size()) +
                    " rows for " + std::to_string(n) + " processes");
    return report;
  }
  if (topo.root >= n) add("root_out_of_range", "root id out of range");
  std::set<ProcessId> byz_seen;
  for (ProcessId b : topo.byzantine) {
    if (b >= n)
      add("byzantine_out_of_range",
          "Byzantine id " + std::to_string(b) + " out of range");
    if (!byz_seen.insert(b).second)
      add("duplicate_byzantine", "Byzantine id " + std::to_string(b) + " repeated");
  }
  if (!std::is_sorted(topo.byzantine.begin(), topo.byzantine.end()))
    add("unsorted_byzantine", "Byzantine set must be sorted");

  bool adjacency_ok = true;
  for (ProcessId v = 0; v < n; ++v) {
    std::set<ProcessId> seen;
    for (ProcessId u : topo.neighbors[v]) {
      if (u >= n) {
        add("unknown_neighbor", "process " + std::to_string(v) +
                                    " lists unknown neighbor " + std::to_string(u));
        adjacency_ok = false;
        continue;
      }
      if (u == v) add("self_loop", "self-loop at " + std::to_string(v));
      if (!seen.insert(u).second)
        add("duplicate_neighbor", "process " + std::to_string(v) +
                                      " lists neighbor " + std::to_string(u) +
                                      " twice");
      const auto& nu = topo.neighbors[u];
      if (std::find(nu.begin(), nu.end(), v) == nu.end()) {
        add("asymmetric_edge", "asymmetric edge " + std::to_string(v) + "-" +
                                   std::to_string(u));
      }
    }
  }
  if (!adjacency_ok) return report;

  auto all = bfs_distances(topo, {0}, false);
  if (std::find(all.begin(), all.end(), kUnreachable) != all.end())
    add("disconnected", "graph is not connected");

  if (topo.root < n && topo.is_byzantine(topo.root))
    add("root_is_byzantine", "root is Byzantine");

  if (topo.root < n && !topo.is_byzantine(topo.root)) {
    auto correct = bfs_distances(topo, {topo.root}, true);
    for (ProcessId v = 0; v < n; ++v) {
      if (!topo.is_byzantine(v) && correct[v] == kUnreachable) {
        add("correct_subgraph_disconnected", "correct subgraph disconnected");
        break;
      }
    }
  }
  return report;
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::vector<ProcessId> parse_id_list(std::string_view s, std::size_t line) {
  std::string text(s);
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream is(text);
  std::vector<ProcessId> out;
  std::string tok;
  while (is >> tok) {
    auto v = parse_uint(tok);
    if (!v || *v > UINT32_MAX) throw ParseError(line, "bad process id '" + tok + "'");
    out.push_back(static_cast<ProcessId>(*v));
  }
  return out;
}

}  // namespace

Topology load_topology(std::string_view text) {
  Topology topo;
  std::vector<bool> seen_row;
  int header_stage = 0;  // 0: expect n, 1: root, 2: byzantine, 3: rows
  std::size_t line_no = 0;
  std::size_t last_line = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    last_line = line_no;

    auto keyword = [&](std::string_view kw) -> std::optional<std::string> {
      if (line.rfind(kw, 0) != 0) return std::nullopt;
      if (line.size() > kw.size() && line[kw.size()] != ' ' && line[kw.size()] != '\t')
        return std::nullopt;
      return trim(std::string_view(line).substr(kw.size()));
    };

    switch (header_stage) {
      case 0: {
        auto rest = keyword("n");
        if (!rest) throw ParseError(line_no, "expected 'n <count>'");
        auto v = parse_uint(*rest);
        if (!v || *v == 0 || *v > 1u << 20) throw ParseError(line_no, "bad process count");
        topo.process_count = *v;
        topo.neighbors.assign(*v, {});
        seen_row.assign(*v, false);
        header_stage = 1;
        break;
      }
      case 1: {
        auto rest = keyword("root");
        if (!rest) throw ParseError(line_no, "expected 'root <id>'");
        auto v = parse_uint(*rest);
        if (!v || *v >= topo.process_count) throw ParseError(line_no, "bad root id");
        topo.root = static_cast<ProcessId>(*v);
        header_stage = 2;
        break;
      }
      case 2: {
        auto rest = keyword("byzantine");
        if (!rest) throw ParseError(line_no, "expected 'byzantine <ids>'");
        topo.byzantine = parse_id_list(*rest, line_no);
        for (ProcessId b : topo.byzantine)
          if (b >= topo.process_count) throw ParseError(line_no, "Byzantine id out of range");
        std::sort(topo.byzantine.begin(), topo.byzantine.end());
        if (std::adjacent_find(topo.byzantine.begin(), topo.byzantine.end()) !=
            topo.byzantine.end())
          throw ParseError(line_no, "Byzantine id repeated");
        header_stage = 3;
        break;
      }
      default: {
        auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError(line_no, "expected '<id>: <neighbors>'");
        auto id = parse_uint(trim(std::string_view(line).substr(0, colon)));
        if (!id || *id >= topo.process_count) throw ParseError(line_no, "bad process id");
        if (seen_row[*id]) throw ParseError(line_no, "process listed twice");
        seen_row[*id] = true;
        topo.neighbors[*id] = parse_id_list(std::string_view(line).substr(colon + 1), line_no);
        break;
      }
    }
  }
  if (header_stage < 3) throw ParseError(line_no, "truncated header");
  for (std::size_t v = 0; v < topo.process_count; ++v)
    if (!seen_row[v])
      throw ParseError(last_line, "missing neighbor line for process " + std::to_string(v));

  auto report = validate(topo);
  if (!report.empty()) {
    std::string msg = report.front().message;
    for (std::size_t i = 1; i < report.size(); ++i) msg += "; " + report[i].message;
    throw TopologyError(msg, std::move(report));
  }
  return topo;
}

std::string serialize_topology(const Topology& topo) {
  std::ostringstream os;
  os << "n " << topo.process_count << "\n";
  os << "root " << topo.root << "\n";
  os << "byzantine";
  for (ProcessId b : topo.byzantine) os << ' ' << b;
  os << "\n";
  for (std::size_t v = 0; v < topo.process_count; ++v) {
    os << v << ':';
    for (ProcessId u : topo.neighbors[v]) os << ' ' << u;
    os << "\n";
  }
  return os.str();
}

std::uint64_t topology_digest(const Topology& topo) {
  return fnv1a64(serialize_topology(topo));
}

std::vector<ProcessId> c_correct_set(const Topology& topo, std::uint64_t c) {
  std::vector<ProcessId> out;
  if (topo.byzantine.empty()) {
    out.resize(topo.process_count);
    std::iota(out.begin(), out.end(), ProcessId{0});
    return out;
  }
  auto dist = bfs_distances(topo, topo.byzantine, false);
  for (ProcessId v = 0; v < topo.process_count; ++v) {
    if (topo.is_byzantine(v)) continue;
    if (dist[v] == kUnreachable || dist[v] >= c) out.push_back(v);
  }
  return out;
}

GraphMetrics graph_metrics(const Topology& topo) {
  GraphMetrics m;
  m.n = topo.process_count;
  m.f = topo.byzantine.size();
  for (const auto& nv : topo.neighbors) m.max_degree = std::max(m.max_degree, nv.size());
  auto from_root = bfs_distances(topo, {topo.root}, true);
  m.delta_to_root.assign(topo.process_count, std::nullopt);
  for (ProcessId v = 0; v < topo.process_count; ++v)
    if (!topo.is_byzantine(v) && from_root[v] != kUnreachable)
      m.delta_to_root[v] = from_root[v];
  for (ProcessId v = 0; v < topo.process_count; ++v) {
    if (topo.is_byzantine(v)) continue;
    auto dist = bfs_distances(topo, {v}, true);
    for (ProcessId u = 0; u < topo.process_count; ++u)
      if (!topo.is_byzantine(u) && dist[u] != kUnreachable)
        m.correct_diameter = std::max(m.correct_diameter, dist[u]);
  }
  return m;
}

std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > UINT64_MAX / base) return UINT64_MAX;
    r *= base;
  }
  return r;
}

namespace {

void add_edge(std::vector<std::set<ProcessId>>& adj, ProcessId a, ProcessId b) {
  adj[a].insert(b);
  adj[b].insert(a);
}

Topology from_adjacency(const std::vector<std::set<ProcessId>>& adj) {
  Topology t;
  t.process_count = adj.size();
  t.root = 0;
  for (const auto& s : adj) t.neighbors.emplace_back(s.begin(), s.end());
  return t;
}

}  // namespace

Topology generate(const GeneratorSpec& spec) {
  std::size_t n = spec.size;
  if (spec.kind == GraphKind::grid) {
    if (spec.rows == 0 || spec.cols == 0) throw TopologyError("grid needs rows x cols >= 1");
    n = spec.rows * spec.cols;
  }
  if (n == 0) throw TopologyError("size must be >= 1");
  std::vector<std::set<ProcessId>> adj(n);
  std::mt19937_64 rng(spec.seed);

  switch (spec.kind) {
    case GraphKind::line:
      for (ProcessId i = 0; i + 1 < n; ++i) add_edge(adj, i, i + 1);
      break;
    case GraphKind::ring:
      if (n < 3) throw TopologyError("ring needs at least 3 processes");
      for (ProcessId i = 0; i < n; ++i) add_edge(adj, i, static_cast<ProcessId>((i + 1) % n));
      break;
    case GraphKind::star:
      for (ProcessId i = 1; i < n; ++i) add_edge(adj, 0, i);
      break;
    case GraphKind::grid:
      for (std::size_t r = 0; r < spec.rows; ++r)
        for (std::size_t c = 0; c < spec.cols; ++c) {
          auto id = static_cast<ProcessId>(r * spec.cols + c);
          if (c + 1 < spec.cols) add_edge(adj, id, id + 1);
          if (r + 1 < spec.rows) add_edge(adj, id, static_cast<ProcessId>(id + spec.cols));
        }
      break;
    case GraphKind::random_connected: {
      for (ProcessId i = 1; i < n; ++i) {
        std::uniform_int_distribution<ProcessId> pick(0, i - 1);
        add_edge(adj, i, pick(rng));
      }
      std::bernoulli_distribution extra(std::clamp(spec.edge_probability, 0.0, 1.0));
      for (ProcessId i = 0; i < n; ++i)
        for (ProcessId j = i + 1; j < n; ++j)
          if (!adj[i].count(j) && extra(rng)) add_edge(adj, i, j);
      break;
    }
  }

  Topology topo = from_adjacency(adj);
  const auto& pl = spec.placement;
  switch (pl.rule) {
    case ByzantinePlacement::Rule::none:
      break;
    case ByzantinePlacement::Rule::explicit_ids:
      topo.byzantine = pl.ids;
      break;
    case ByzantinePlacement::Rule::far_end: {
      auto dist = bfs_distances(topo, {0}, false);
      ProcessId far = 0;
      for (ProcessId v = 0; v < n; ++v)
        if (dist[v] != kUnreachable && dist[v] >= dist[far]) far = v;
      if (far != 0) topo.byzantine = {far};
      break;
    }
    case ByzantinePlacement::Rule::random_count: {
      if (pl.count + 1 > n) throw TopologyError("too many Byzantine processes requested");
      constexpr int kRetries = 64;
      for (int attempt = 0; attempt < kRetries; ++attempt) {
        std::vector<ProcessId> pool(n - 1);
        std::iota(pool.begin(), pool.end(), ProcessId{1});
        std::shuffle(pool.begin(), pool.end(), rng);
        topo.byzantine.assign(pool.begin(), pool.begin() + static_cast<long>(pl.count));
        std::sort(topo.byzantine.begin(), topo.byzantine.end());
        if (validate(topo).empty()) return topo;
      }
      throw TopologyError("no Byzantine placement keeps the correct subgraph connected");
    }
  }
  std::sort(topo.byzantine.begin(), topo.byzantine.end());
  topo.byzantine.erase(std::unique(topo.byzantine.begin(), topo.byzantine.end()),
                       topo.byzantine.end());
  auto report = validate(topo);
  if (!report.empty()) throw TopologyError(report.front().message, report);
  return topo;
}

GeneratorSpec parse_generator_spec(std::string_view text) {
  GeneratorSpec spec;
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  if (parts.size() < 2) throw TopologyError("generator spec needs '<kind>:<size>'");

  const std::string& kind = parts[0];
  if (kind == "line") spec.kind = GraphKind::line;
  else if (kind == "ring") spec.kind = GraphKind::ring;
  else if (kind == "star") spec.kind = GraphKind::star;
  else if (kind == "grid") spec.kind = GraphKind::grid;
  else if (kind == "random" || kind == "random_connected") spec.kind = GraphKind::random_connected;
  else throw TopologyError("unknown graph kind '" + kind + "'");

  if (spec.kind == GraphKind::grid) {
    auto x = parts[1].find('x');
    auto r = x == std::string::npos ? std::nullopt : parse_uint(std::string_view(parts[1]).substr(0, x));
    auto c = x == std::string::npos ? std::nullopt : parse_uint(std::string_view(parts[1]).substr(x + 1));
    if (!r || !c) throw TopologyError("grid size must be '<rows>x<cols>'");
    spec.rows = *r;
    spec.cols = *c;
    spec.size = *r * *c;
  } else {
    auto s = parse_uint(parts[1]);
    if (!s) throw TopologyError("bad size '" + parts[1] + "'");
    spec.size = *s;
  }

  for (std::size_t i = 2; i < parts.size(); ++i) {
    auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw TopologyError("expected key=value in '" + parts[i] + "'");
    std::string key = parts[i].substr(0, eq);
    std::string val = parts[i].substr(eq + 1);
    if (key == "seed") {
      auto s = parse_uint(val);
      if (!s) throw TopologyError("bad seed");
      spec.seed = *s;
    } else if (key == "p") {
      try {
        spec.edge_probability = std::stod(val);
      } catch (const std::exception&) {
        throw TopologyError("bad edge probability");
      }
    } else if (key == "byz") {
      if (val == "far") {
        spec.placement.rule = ByzantinePlacement::Rule::far_end;
      } else if (val.rfind("rand", 0) == 0) {
        auto k = parse_uint(std::string_view(val).substr(4));
        if (!k) throw TopologyError("bad random Byzantine count");
        spec.placement.rule = ByzantinePlacement::Rule::random_count;
        spec.placement.count = *k;
      } else if (val.empty() || val == "none") {
        spec.placement.rule = ByzantinePlacement::Rule::none;
      } else {
        spec.placement.rule = ByzantinePlacement::Rule::explicit_ids;
        std::string ids = val;
        std::replace(ids.begin(), ids.end(), ',', ' ');
        std::istringstream is(ids);
        std::string tok;
        while (is >> tok) {
          auto v = parse_uint(tok);
          if (!v) throw TopologyError("bad Byzantine id '" + tok + "'");
          spec.placement.ids.push_back(static_cast<ProcessId>(*v));
        }
      }
    } else {
      throw TopologyError("unknown generator key '" + key + "'");
    }
  }
  return spec;
}

}  // namespace sstab
