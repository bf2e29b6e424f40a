#include "faas/engine.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "faas/policies.hpp"

namespace faas {

Simulation::Simulation(const InstanceIndex& index, ClusterConfig cluster, PolicyConfig policy)
    : index_(index), policy_(policy) {
  state_.index = &index_;
  state_.cluster = cluster;
  state_.machine_envs.resize(static_cast<std::size_t>(cluster.machines));
  state_.machine_free.assign(static_cast<std::size_t>(cluster.machines), cluster.capacity);
}

int Simulation::find_unused_environment(int task_id) const {
  const int family = index_.task(task_id).family;
  for (const auto& resident : state_.machine_envs) {
    for (int env_id : resident) {
      const EnvState& e = state_.envs[static_cast<std::size_t>(env_id)];
      if (e.family == family && e.idle()) return env_id;
    }
  }
  return -1;
}

int Simulation::find_environment_to_wait(int task_id, Time t) const {
  const int family = index_.task(task_id).family;
  const Time setup = index_.instance().family(family).setup;
  int best = -1;
  Time best_c = 0;
  for (const auto& resident : state_.machine_envs) {
    for (int env_id : resident) {
      const EnvState& e = state_.envs[static_cast<std::size_t>(env_id)];
      if (e.family != family) continue;
      if (best < 0 || e.ready < best_c) {
        best = env_id;
        best_c = e.ready;
      }
    }
  }
  if (best >= 0 && best_c <= t + setup) return best;
  return -1;
}

int Simulation::place_new_environment(int task_id, Time t) {
  const int family = index_.task(task_id).family;
  const Res size = index_.instance().family(family).size;
  for (int m = 0; m < state_.cluster.machines; ++m) {
    if (state_.free_on(m) >= size) return state_.create_env(family, m, t).env_id;
  }
  return -1;
}

int Simulation::remove_and_place_environment(int task_id, Time t) {
  const int family = index_.task(task_id).family;
  const Res size = index_.instance().family(family).size;
  auto selection = select_removals(policy_.removal, state_, family, size);
  if (!selection) return -1;
  for (int victim : selection->victims) state_.remove_env(victim, t);
  return state_.create_env(family, selection->machine, t).env_id;
}

void Simulation::assign_task(int env_id, int task_id, Time release) {
  EnvState& e = state_.envs[static_cast<std::size_t>(env_id)];
  const TaskSpec& task = index_.task(task_id);
  if (e.family != task.family)
    throw std::logic_error("assign_task: family mismatch (engine bug)");
  EnvState::Slot slot;
  slot.task = task_id;
  slot.release = release;
  slot.start = std::max(e.ready, release);
  slot.end = slot.start + index_.instance().family(task.family).duration;
  e.assigned.push_back(slot);
  e.ready = slot.end;

  status_[task_id] = TaskStatus::Assigned;
  completion_[task_id] = slot.end;
  env_of_[task_id] = env_id;
}

void Simulation::enqueue(int task_id, Time release) {
  state_.queue.push_back({task_id, release, state_.seq_counter++});
  status_[task_id] = TaskStatus::Queued;
}

bool Simulation::pred_times_known(int task_id) const {
  for (int p : index_.task(task_id).preds) {
    if (policy_.dep == DepMode::Def) {
      auto it = status_.find(p);
      if (it == status_.end() || it->second != TaskStatus::Completed) return false;
    } else {
      if (completion_.find(p) == completion_.end()) return false;
    }
  }
  return true;
}

Time Simulation::release_from_preds(int task_id) const {
  Time release = 0;
  for (int p : index_.task(task_id).preds)
    release = std::max(release, completion_.at(p));
  return release;
}

int Simulation::queue_dependent_tasks(int task_id) {
  int added = 0;
  for (int succ : index_.info(task_id).succs) {
    auto it = status_.find(succ);
    if (it != status_.end() && it->second != TaskStatus::NotReady) continue;
    if (!pred_times_known(succ)) continue;
    enqueue(succ, release_from_preds(succ));
    ++added;
  }
  return added;
}

void Simulation::scheduling_step(Time t, const std::vector<int>& completed_now) {
  if (policy_.dep == DepMode::Def) {
    for (int task : completed_now) queue_dependent_tasks(task);
  }

  bool repeat = true;
  while (repeat) {
    repeat = false;
    const auto ordered = order_queue(policy_.ordering, state_.queue, state_);
    bool assigned_any = false;
    bool restart = false;
    for (const QueuedTask& qt : ordered) {
      int env = find_unused_environment(qt.task);
      if (env < 0 && policy_.wait) env = find_environment_to_wait(qt.task, t);
      if (env < 0) env = place_new_environment(qt.task, t);
      if (env < 0) env = remove_and_place_environment(qt.task, t);
      if (env < 0) continue;  // stays in the queue, original seq

      assign_task(env, qt.task, qt.release);
      std::erase_if(state_.queue, [&qt](const QueuedTask& q) { return q.task == qt.task; });
      assigned_any = true;

      if (policy_.dep == DepMode::Start || policy_.dep == DepMode::Stbr) {
        const int added = queue_dependent_tasks(qt.task);
        if (policy_.dep == DepMode::Stbr && added > 0) {
          restart = true;  // reorder immediately and restart placement
          break;
        }
      }
    }
    if (policy_.dep == DepMode::Def) break;  // single pass
    repeat = restart || assigned_any;
  }
}

void Simulation::record_completions_until(Time t, std::vector<int>* completed_now) {
  for (EnvState& e : state_.envs) {
    while (!e.assigned.empty() && e.assigned.front().end <= t) {
      EnvState::Slot slot = e.assigned.front();
      e.assigned.erase(e.assigned.begin());
      e.history.push_back(slot);
      e.last_use = slot.end;
      status_[slot.task] = TaskStatus::Completed;
      ++completed_count_;
      completed_now->push_back(slot.task);
    }
  }
  // Simultaneous completions enqueue successors in (job id, task index) order.
  std::sort(completed_now->begin(), completed_now->end(), [this](int a, int b) {
    const auto& ia = index_.info(a);
    const auto& ib = index_.info(b);
    if (ia.job_id != ib.job_id) return ia.job_id < ib.job_id;
    return ia.spec->index < ib.spec->index;
  });
}

Time Simulation::next_event_after(Time t) const {
  Time next = -1;
  for (const EnvState& e : state_.envs) {
    if (e.assigned.empty()) continue;
    const Time end = e.assigned.front().end;
    if (end > t && (next < 0 || end < next)) next = end;
  }
  return next;
}

SimResult Simulation::build_result(double wall_seconds) const {
  return collect_result(state_, index_, policy_.str(), wall_seconds);
}

SimResult Simulation::run() {
  const auto started = std::chrono::steady_clock::now();
  for (const FamilySpec& f : index_.instance().families) {
    if (f.size > state_.cluster.capacity)
      throw InfeasibleInstance("family " + std::to_string(f.id) +
                               " size exceeds machine capacity");
  }

  Time t = 0;
  for (int first : index_.first_tasks()) enqueue(first, 0);
  scheduling_step(t, {});

  const int total = index_.total_tasks();
  while (completed_count_ < total) {
    const Time next = next_event_after(t);
    if (next < 0)
      throw DeadlockError("no runnable event with " +
                          std::to_string(total - completed_count_) + " tasks pending");
    t = next;
    std::vector<int> done;
    record_completions_until(t, &done);
    scheduling_step(t, done);
  }

  const auto finished = std::chrono::steady_clock::now();
  return build_result(std::chrono::duration<double>(finished - started).count());
}

SimResult simulate(const Instance& instance, const ClusterConfig& cluster,
                   const PolicyConfig& policy, std::uint64_t seed) {
  if (policy.ow) {
    SimResult result = ow_simulate(instance, cluster, seed);
    result.seed = seed;
    return result;
  }
  InstanceIndex index(instance);
  Simulation sim(index, cluster, policy);
  SimResult result = sim.run();
  result.seed = seed;
  return result;
}

}  // namespace faas
