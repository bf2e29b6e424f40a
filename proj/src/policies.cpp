#include "faas/policies.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <numeric>
#include <set>
#include <unordered_map>

namespace faas {

Time remaining_work(int task_id, const InstanceIndex& index) {
  return index.info(task_id).remaining_work;
}

std::vector<QueuedTask> order_queue(Ordering ordering,
                                    const std::vector<QueuedTask>& queue,
                                    const ClusterState& state) {
  std::vector<QueuedTask> out = queue;
  std::sort(out.begin(), out.end(),
            [](const QueuedTask& a, const QueuedTask& b) { return a.seq < b.seq; });
  const InstanceIndex& index = *state.index;

  switch (ordering) {
    case Ordering::FIFO:
      break;
    case Ordering::EF: {
      // Families with at least one idle, initialized environment anywhere in
      // the cluster; computed once per call.
      std::set<int> idle_families;
      for (const EnvState& e : state.envs) {
        if (e.idle()) idle_families.insert(e.family);
      }
      std::stable_partition(out.begin(), out.end(), [&](const QueuedTask& q) {
        return idle_families.count(index.task(q.task).family) > 0;
      });
      break;
    }
    case Ordering::SJF:
      std::stable_sort(out.begin(), out.end(), [&](const QueuedTask& a, const QueuedTask& b) {
        return index.instance().family(index.task(a.task).family).duration <
               index.instance().family(index.task(b.task).family).duration;
      });
      break;
    case Ordering::SW:
      std::stable_sort(out.begin(), out.end(), [&](const QueuedTask& a, const QueuedTask& b) {
        return remaining_work(a.task, index) < remaining_work(b.task, index);
      });
      break;
    case Ordering::RT:
      std::stable_sort(out.begin(), out.end(), [](const QueuedTask& a, const QueuedTask& b) {
        return a.release < b.release;
      });
      break;
  }
  return out;
}

namespace {

// Removable == idle: empty assignment queue and no running task.
std::vector<int> removable_envs(const ClusterState& state, int machine) {
  std::vector<int> out;
  for (int env_id : state.machine_envs[static_cast<std::size_t>(machine)]) {
    if (state.envs[static_cast<std::size_t>(env_id)].idle()) out.push_back(env_id);
  }
  return out;
}

Res env_size(const ClusterState& state, int env_id) {
  const EnvState& e = state.envs[static_cast<std::size_t>(env_id)];
  return state.instance().family(e.family).size;
}

// Takes candidates in the given priority order until the freed space fits.
std::vector<int> victim_prefix(const ClusterState& state, const std::vector<int>& ordered,
                               Res free_now, Res q_needed) {
  std::vector<int> victims;
  Res freed = free_now;
  for (int env_id : ordered) {
    if (freed >= q_needed) break;
    victims.push_back(env_id);
    freed += env_size(state, env_id);
  }
  return victims;
}

}  // namespace

std::optional<RemovalSelection> select_removals(Removal removal,
                                                const ClusterState& state,
                                                int family, Res q_needed) {
  (void)family;
  const int machines = state.cluster.machines;

  auto feasible = [&](int machine, const std::vector<int>& removable) {
    Res total = state.free_on(machine);
    for (int env_id : removable) total += env_size(state, env_id);
    return total >= q_needed;
  };

  auto lru_key = [&](int env_id) {
    const EnvState& e = state.envs[static_cast<std::size_t>(env_id)];
    return std::pair<Time, int>(e.last_use, env_id);
  };

  if (removal == Removal::LRU) {
    for (int m = 0; m < machines; ++m) {
      auto removable = removable_envs(state, m);
      if (!feasible(m, removable)) continue;
      std::sort(removable.begin(), removable.end(),
                [&](int a, int b) { return lru_key(a) < lru_key(b); });
      return RemovalSelection{m, victim_prefix(state, removable, state.free_on(m), q_needed)};
    }
    return std::nullopt;
  }

  if (removal == Removal::MinTime) {
    std::optional<RemovalSelection> best;
    Time best_cost = 0;
    for (int m = 0; m < machines; ++m) {
      auto removable = removable_envs(state, m);
      if (!feasible(m, removable)) continue;
      std::sort(removable.begin(), removable.end(), [&](int a, int b) {
        const Time sa = state.instance().family(state.envs[static_cast<std::size_t>(a)].family).setup;
        const Time sb = state.instance().family(state.envs[static_cast<std::size_t>(b)].family).setup;
        if (sa != sb) return sa < sb;
        return lru_key(a) < lru_key(b);
      });
      auto victims = victim_prefix(state, removable, state.free_on(m), q_needed);
      Time cost = 0;
      for (int v : victims)
        cost += state.instance().family(state.envs[static_cast<std::size_t>(v)].family).setup;
      if (!best || cost < best_cost) {
        best = RemovalSelection{m, victims};
        best_cost = cost;
      }
    }
    return best;
  }

  // MinFamily: evict from the most-populated families; prefer the machine
  // that leaves the fewest families with zero environments cluster-wide.
  std::unordered_map<int, int> family_count;
  for (const EnvState& e : state.envs) {
    if (!e.removed()) ++family_count[e.family];
  }
  std::optional<RemovalSelection> best;
  int best_cost = 0;
  for (int m = 0; m < machines; ++m) {
    auto removable = removable_envs(state, m);
    if (!feasible(m, removable)) continue;
    std::sort(removable.begin(), removable.end(), [&](int a, int b) {
      const int ca = family_count[state.envs[static_cast<std::size_t>(a)].family];
      const int cb = family_count[state.envs[static_cast<std::size_t>(b)].family];
      if (ca != cb) return ca > cb;
      return lru_key(a) < lru_key(b);
    });
    auto victims = victim_prefix(state, removable, state.free_on(m), q_needed);
    std::unordered_map<int, int> evicted;
    for (int v : victims) ++evicted[state.envs[static_cast<std::size_t>(v)].family];
    int zeroed = 0;
    for (const auto& [fam, cnt] : evicted) {
      if (family_count[fam] - cnt == 0) ++zeroed;
    }
    if (!best || zeroed < best_cost) {
      best = RemovalSelection{m, victims};
      best_cost = zeroed;
    }
  }
  return best;
}

int coprime_step(int m, Rng& rng) {
  if (m <= 2) return 1;
  std::vector<int> candidates;
  for (int k = 1; k < m; ++k) {
    if (std::gcd(k, m) == 1) candidates.push_back(k);
  }
  return candidates[rng.index(candidates.size())];
}

// ---------------------------------------------------------------------------
// OW baseline

namespace {

class OwSimulation {
 public:
  OwSimulation(const InstanceIndex& index, ClusterConfig cluster, std::uint64_t seed)
      : index_(index), rng_(seed) {
    state_.index = &index_;
    state_.cluster = cluster;
    state_.machine_envs.resize(static_cast<std::size_t>(cluster.machines));
    state_.machine_free.assign(static_cast<std::size_t>(cluster.machines), cluster.capacity);
    local_.resize(static_cast<std::size_t>(cluster.machines));

    const int m = cluster.machines;
    for (const FamilySpec& f : index.instance().families) {
      Route r;
      r.home = static_cast<int>(rng_.uniform(0, m - 1));
      r.step = coprime_step(m, rng_);
      routes_[f.id] = r;
    }
  }

  SimResult run() {
    const auto started = std::chrono::steady_clock::now();
    for (const FamilySpec& f : index_.instance().families) {
      if (f.size > state_.cluster.capacity)
        throw InfeasibleInstance("family " + std::to_string(f.id) +
                                 " size exceeds machine capacity");
    }

    Time t = 0;
    for (int first : index_.first_tasks()) route_task(first, 0, t);
    drain_local_queues(t);

    const int total = index_.total_tasks();
    while (completed_ < total) {
      const Time next = next_event_after(t);
      if (next < 0)
        throw DeadlockError("OW: no runnable event with " +
                            std::to_string(total - completed_) + " tasks pending");
      t = next;
      std::vector<int> done;
      record_completions_until(t, &done);
      for (int task : done) {
        for (int succ : index_.info(task).succs) {
          if (!preds_completed(succ)) continue;
          Time release = 0;
          for (int p : index_.task(succ).preds) release = std::max(release, completion_.at(p));
          route_task(succ, release, t);
        }
      }
      drain_local_queues(t);
    }
    const auto finished = std::chrono::steady_clock::now();
    return collect_result(state_, index_, "OW",
                          std::chrono::duration<double>(finished - started).count());
  }

 private:
  struct Route {
    int home = 0;
    int step = 1;
  };

  bool preds_completed(int task_id) const {
    for (int p : index_.task(task_id).preds) {
      if (!completed_set_.count(p)) return false;
    }
    return true;
  }

  Res removable_total(int machine) const {
    Res total = 0;
    for (int env_id : state_.machine_envs[static_cast<std::size_t>(machine)]) {
      if (state_.envs[static_cast<std::size_t>(env_id)].idle())
        total += state_.instance().family(state_.envs[static_cast<std::size_t>(env_id)].family).size;
    }
    return total;
  }

  int idle_env_of(int machine, int family) const {
    for (int env_id : state_.machine_envs[static_cast<std::size_t>(machine)]) {
      const EnvState& e = state_.envs[static_cast<std::size_t>(env_id)];
      if (e.family == family && e.idle()) return env_id;
    }
    return -1;
  }

  bool machine_matches(int machine, int family) const {
    if (idle_env_of(machine, family) >= 0) return true;
    const Res size = state_.instance().family(family).size;
    return state_.free_on(machine) + removable_total(machine) >= size;
  }

  void assign(int env_id, int task_id, Time release) {
    EnvState& e = state_.envs[static_cast<std::size_t>(env_id)];
    EnvState::Slot slot;
    slot.task = task_id;
    slot.release = release;
    slot.start = std::max(e.ready, release);
    slot.end = slot.start + state_.instance().family(e.family).duration;
    e.assigned.push_back(slot);
    e.ready = slot.end;
    completion_[task_id] = slot.end;
  }

  void place_on(int machine, int task_id, Time release, Time t) {
    const int family = index_.task(task_id).family;
    const int idle = idle_env_of(machine, family);
    if (idle >= 0) {
      assign(idle, task_id, release);
      return;
    }
    // Evict unused environments LRU-first until the new one fits.
    const Res size = state_.instance().family(family).size;
    while (state_.free_on(machine) < size) {
      std::vector<int> removable;
      for (int env_id : state_.machine_envs[static_cast<std::size_t>(machine)]) {
        if (state_.envs[static_cast<std::size_t>(env_id)].idle()) removable.push_back(env_id);
      }
      if (removable.empty())
        throw std::logic_error("OW place_on: no removable environment (engine bug)");
      auto it = std::min_element(removable.begin(), removable.end(), [&](int a, int b) {
        const EnvState& ea = state_.envs[static_cast<std::size_t>(a)];
        const EnvState& eb = state_.envs[static_cast<std::size_t>(b)];
        return std::pair(ea.last_use, a) < std::pair(eb.last_use, b);
      });
      state_.remove_env(*it, t);
    }
    const int env_id = state_.create_env(family, machine, t).env_id;
    assign(env_id, task_id, release);
  }

  void route_task(int task_id, Time release, Time t) {
    const int family = index_.task(task_id).family;
    const Route& r = routes_.at(family);
    const int m = state_.cluster.machines;
    for (int i = 0; i < m; ++i) {
      const int machine = (r.home + i * r.step) % m;
      if (machine_matches(machine, family)) {
        place_on(machine, task_id, release, t);
        return;
      }
    }
    const int machine = static_cast<int>(rng_.index(static_cast<std::size_t>(m)));
    local_[static_cast<std::size_t>(machine)].push_back({task_id, release});
  }

  void drain_local_queues(Time t) {
    for (int m = 0; m < state_.cluster.machines; ++m) {
      auto& q = local_[static_cast<std::size_t>(m)];
      while (!q.empty()) {
        const auto [task_id, release] = q.front();
        const int family = index_.task(task_id).family;
        if (!machine_matches(m, family)) break;
        place_on(m, task_id, release, t);
        q.pop_front();
      }
    }
  }

  void record_completions_until(Time t, std::vector<int>* done) {
    for (EnvState& e : state_.envs) {
      while (!e.assigned.empty() && e.assigned.front().end <= t) {
        EnvState::Slot slot = e.assigned.front();
        e.assigned.erase(e.assigned.begin());
        e.history.push_back(slot);
        e.last_use = slot.end;
        completed_set_.insert(slot.task);
        ++completed_;
        done->push_back(slot.task);
      }
    }
    std::sort(done->begin(), done->end(), [this](int a, int b) {
      const auto& ia = index_.info(a);
      const auto& ib = index_.info(b);
      if (ia.job_id != ib.job_id) return ia.job_id < ib.job_id;
      return ia.spec->index < ib.spec->index;
    });
  }

  Time next_event_after(Time t) const {
    Time next = -1;
    for (const EnvState& e : state_.envs) {
      if (e.assigned.empty()) continue;
      const Time end = e.assigned.front().end;
      if (end > t && (next < 0 || end < next)) next = end;
    }
    return next;
  }

  const InstanceIndex& index_;
  Rng rng_;
  ClusterState state_;
  std::unordered_map<int, Route> routes_;
  std::vector<std::deque<std::pair<int, Time>>> local_;  // per-machine FIFO overflow
  std::unordered_map<int, Time> completion_;
  std::set<int> completed_set_;
  int completed_ = 0;
};

}  // namespace

SimResult ow_simulate(const Instance& instance, const ClusterConfig& cluster,
                      std::uint64_t seed) {
  InstanceIndex index(instance);
  OwSimulation sim(index, cluster, seed);
  return sim.run();
}

}  // namespace faas
