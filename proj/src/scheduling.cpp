// Copyright 2026 The sstab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sstab/scheduling.hpp"

#include <algorithm>
#include <stdexcept>

namespace sstab {

std::string_view to_string(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::round_robin: return "round_robin";
    case SchedulerKind::random_fair: return "random_fair";
    case SchedulerKind::adversarial_bounded: return "adversarial_bounded";
  }
  return "?";
}

std::string_view to_string(DaemonMode m) {
  return m == DaemonMode::central ? "central" : "distributed";
}

SchedulerKind parse_scheduler_kind(std::string_view s) {
  if (s == "round_robin") return SchedulerKind::round_robin;
  if (s == "random_fair") return SchedulerKind::random_fair;
  if (s == "adversarial_bounded") return SchedulerKind::adversarial_bounded;
  throw std::invalid_argument("unknown scheduler '" + std::string(s) + "'");
}

DaemonMode parse_daemon_mode(std::string_view s) {
  if (s == "central") return DaemonMode::central;
  if (s == "distributed") return DaemonMode::distributed;
  throw std::invalid_argument("unknown daemon mode '" + std::string(s) + "'");
}

Scheduler::Scheduler(SchedulerPolicy policy, std::size_t process_count)
    : policy_(policy), ages_(process_count, 0), rng_(policy.seed) {
  if (policy_.fairness_bound == 0) throw std::invalid_argument("fairness bound must be >= 1");
}

std::string Scheduler::describe() const {
  return "kind=" + std::string(to_string(policy_.kind)) +
         " daemon=" + std::string(to_string(policy_.daemon)) +
         " bound=" + std::to_string(policy_.fairness_bound) + " seed=" + std::to_string(policy_.seed);
}

std::vector<ProcessId> Scheduler::select(std::span<const ProcessId> activable, std::uint64_t) {
  if (activable.empty()) throw std::invalid_argument("select on an empty activable set");
  std::vector<bool> is_act(ages_.size(), false);
  for (ProcessId v : activable) {
    if (v >= ages_.size()) throw std::invalid_argument("activable id out of range");
    is_act[v] = true;
  }
  for (ProcessId v = 0; v < ages_.size(); ++v)
    if (!is_act[v]) ages_[v] = 0;

  // A central daemon serves one process per step, so it starts serving the
  // oldest early enough that up to B contenders all make their deadline.
  const std::uint32_t bound = policy_.fairness_bound;
  const std::uint32_t due_age =
      policy_.daemon == DaemonMode::distributed ? bound - 1
      : activable.size() >= bound               ? 0
                                                : bound - static_cast<std::uint32_t>(activable.size());
  std::vector<ProcessId> due;
  for (ProcessId v : activable)
    if (ages_[v] >= due_age) due.push_back(v);

  auto oldest = [&](std::span<const ProcessId> set) {
    ProcessId best = set.front();
    for (ProcessId v : set)
      if (ages_[v] > ages_[best]) best = v;
    return best;
  };
  auto uniform = [&](std::span<const ProcessId> set) {
    std::uniform_int_distribution<std::size_t> d(0, set.size() - 1);
    return set[d(rng_)];
  };
  auto next_round_robin = [&] {
    if (last_picked_) {
      for (ProcessId v : activable)
        if (v > *last_picked_) return v;
    }
    return activable.front();
  };
  auto most_recently_served = [&] {
    if (last_picked_ && is_act[*last_picked_]) return *last_picked_;
    ProcessId best = activable.back();
    for (auto it = activable.rbegin(); it != activable.rend(); ++it)
      if (ages_[*it] < ages_[best]) best = *it;
    return best;
  };

  std::vector<ProcessId> chosen;
  if (policy_.daemon == DaemonMode::central) {
    ProcessId pick;
    if (!due.empty()) {
      pick = oldest(due);
    } else {
      switch (policy_.kind) {
        case SchedulerKind::round_robin: pick = next_round_robin(); break;
        case SchedulerKind::random_fair: pick = uniform(activable); break;
        case SchedulerKind::adversarial_bounded: pick = most_recently_served(); break;
        default: pick = activable.front();
      }
    }
    chosen.push_back(pick);
    last_picked_ = pick;
  } else {
    switch (policy_.kind) {
      case SchedulerKind::round_robin:
        chosen.assign(activable.begin(), activable.end());
        break;
      case SchedulerKind::random_fair: {
        std::bernoulli_distribution coin(0.5);
        for (ProcessId v : activable)
          if (coin(rng_)) chosen.push_back(v);
        if (chosen.empty()) chosen.push_back(uniform(activable));
        break;
      }
      case SchedulerKind::adversarial_bounded:
        chosen.push_back(most_recently_served());
        break;
    }
    chosen.insert(chosen.end(), due.begin(), due.end());
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    if (policy_.kind == SchedulerKind::adversarial_bounded)
      last_picked_ = most_recently_served();
    else
      last_picked_ = chosen.back();
  }

  std::vector<bool> is_chosen(ages_.size(), false);
  for (ProcessId v : chosen) is_chosen[v] = true;
  for (ProcessId v : activable) ages_[v] = is_chosen[v] ? 0 : ages_[v] + 1;
  return chosen;
}

std::string_view to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::silent: return "silent";
    case AdversaryKind::random_writes: return "random_writes";
    case AdversaryKind::oscillator: return "oscillator";
    case AdversaryKind::root_impersonator: return "root_impersonator";
    case AdversaryKind::replay: return "replay";
  }
  return "?";
}

AdversaryKind parse_adversary_kind(std::string_view s) {
  if (s == "silent") return AdversaryKind::silent;
  if (s == "random_writes") return AdversaryKind::random_writes;
  if (s == "oscillator") return AdversaryKind::oscillator;
  if (s == "root_impersonator") return AdversaryKind::root_impersonator;
  if (s == "replay") return AdversaryKind::replay;
  throw std::invalid_argument("unknown adversary '" + std::string(s) + "'");
}

Height default_height_cap(const Topology& topo) { return 2 * static_cast<Height>(topo.process_count); }

Adversary::Adversary(AdversaryStrategy strategy, const Topology& topo)
    : strategy_(std::move(strategy)), topo_(&topo), rng_(strategy_.seed) {
  cap_ = strategy_.height_cap.value_or(default_height_cap(topo));
  if (strategy_.targets.empty()) strategy_.targets = topo.byzantine;
  for (ProcessId b : strategy_.targets)
    if (!topo.is_byzantine(b))
      throw std::invalid_argument("adversary target " + std::to_string(b) + " is not Byzantine");
  if (strategy_.period == 0) throw std::invalid_argument("adversary period must be >= 1");
  if (!strategy_.high) strategy_.high = cap_;
  if (strategy_.low > cap_ || *strategy_.high > cap_)
    throw std::invalid_argument("oscillator heights exceed the height cap");
  for (const auto& sw : strategy_.script) {
    if (!topo.is_byzantine(sw.write.process))
      throw std::invalid_argument("scripted write targets a correct process");
    if (sw.write.state.height > cap_)
      throw std::invalid_argument("scripted write exceeds the height cap");
  }
  std::stable_sort(strategy_.script.begin(), strategy_.script.end(),
                   [](const ScriptedWrite& a, const ScriptedWrite& b) { return a.tick < b.tick; });
}

std::string Adversary::describe() const {
  std::string out = "kind=" + std::string(to_string(strategy_.kind));
  if (strategy_.kind == AdversaryKind::oscillator) {
    out += " period=" + std::to_string(strategy_.period) + " low=" + std::to_string(strategy_.low) +
           " high=" + std::to_string(*strategy_.high) +
           " periods=" + std::to_string(strategy_.periods);
  } else if (strategy_.kind == AdversaryKind::random_writes) {
    out += " period=" + std::to_string(strategy_.period);
  } else if (strategy_.kind == AdversaryKind::replay) {
    out += " writes=" + std::to_string(strategy_.script.size());
  }
  out += " start=" + std::to_string(strategy_.start) + " cap=" + std::to_string(cap_) +
         " seed=" + std::to_string(strategy_.seed);
  return out;
}

std::optional<ByzantineWrite> Adversary::write_if_changed(const Configuration& config, ProcessId b,
                                                          ProcessState s) const {
  if (config[b] == s) return std::nullopt;
  return ByzantineWrite{b, s};
}

std::vector<ByzantineWrite> Adversary::act(const Configuration& config, std::uint64_t tick) {
  std::vector<ByzantineWrite> out;
  if (tick < strategy_.start) return out;
  const std::uint64_t t = tick - strategy_.start;
  auto push = [&](std::optional<ByzantineWrite> w) {
    if (w) out.push_back(*w);
  };
  switch (strategy_.kind) {
    case AdversaryKind::silent:
      break;
    case AdversaryKind::random_writes: {
      std::bernoulli_distribution fire(1.0 / static_cast<double>(strategy_.period));
      for (ProcessId b : strategy_.targets) {
        // Draw unconditionally so the stream does not depend on the config.
        bool go = fire(rng_);
        std::uniform_int_distribution<std::size_t> pd(0, topo_->degree(b));
        std::uniform_int_distribution<Height> hd(0, cap_);
        std::size_t p = pd(rng_);
        Height h = hd(rng_);
        if (!go) continue;
        ProcessState s;
        if (p < topo_->degree(b)) s.parent = static_cast<Channel>(p);
        s.height = h;
        push(write_if_changed(config, b, s));
      }
      break;
    }
    case AdversaryKind::oscillator: {
      if (strategy_.periods != 0 && t >= 2 * strategy_.periods * strategy_.period) break;
      const bool low_phase = (t / strategy_.period) % 2 == 0;
      for (ProcessId b : strategy_.targets) {
        ProcessState s = low_phase ? nil_state(strategy_.low)
                                   : ProcessState{topo_->degree(b) > 0 ? std::optional<Channel>(0)
                                                                       : std::nullopt,
                                                  *strategy_.high};
        push(write_if_changed(config, b, s));
      }
      break;
    }
    case AdversaryKind::root_impersonator:
      for (ProcessId b : strategy_.targets) push(write_if_changed(config, b, nil_state(0)));
      break;
    case AdversaryKind::replay:
      for (const auto& sw : strategy_.script)
        if (sw.tick == tick) push(write_if_changed(config, sw.write.process, sw.write.state));
      break;
  }
  for (const auto& w : out)
    if (!topo_->is_byzantine(w.process) || w.state.height > cap_)
      throw std::logic_error("adversary produced an illegal write");
  std::sort(out.begin(), out.end(),
            [](const ByzantineWrite& a, const ByzantineWrite& b) { return a.process < b.process; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const ByzantineWrite& a, const ByzantineWrite& b) {
                          return a.process == b.process;
                        }),
            out.end());
  return out;
}

bool Adversary::finished(const Configuration& config, std::uint64_t tick) const {
  if (strategy_.targets.empty()) return true;
  switch (strategy_.kind) {
    case AdversaryKind::silent:
      return true;
    case AdversaryKind::random_writes:
      return false;
    case AdversaryKind::oscillator:
      return strategy_.periods != 0 &&
             tick >= strategy_.start + 2 * strategy_.periods * strategy_.period;
    case AdversaryKind::root_impersonator:
      if (tick < strategy_.start) return false;
      for (ProcessId b : strategy_.targets)
        if (!(config[b] == nil_state(0))) return false;
      return true;
    case AdversaryKind::replay:
      return strategy_.script.empty() || strategy_.script.back().tick < tick;
  }
  return true;
}

}  // namespace sstab
