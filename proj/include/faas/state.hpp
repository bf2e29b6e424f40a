#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "faas/index.hpp"
#include "faas/model.hpp"

namespace faas {

// Runtime record of one deployed environment. Timelines are append-only:
// once a task is assigned its start and end never change.
struct EnvState {
  struct Slot {
    int task = 0;
    Time release = 0;
    Time start = 0;
    Time end = 0;
  };

  int env_id = 0;  // creation sequence number
  int family = 0;
  int machine = 0;
  Time created_at = 0;
  Time init_done = 0;
  std::optional<Time> removed_at;
  std::vector<Slot> assigned;  // pending, ascending by end
  std::vector<Slot> history;   // completed
  Time ready = 0;              // projected completion of the whole timeline
  Time last_use = 0;           // LRU stamp: last completed end, else created_at

  bool removed() const { return removed_at.has_value(); }
  // Empty assignment queue and not removed; a task ending exactly at the
  // current clock has already been moved to history.
  bool idle() const { return assigned.empty() && !removed(); }
};

struct QueuedTask {
  int task = 0;
  Time release = 0;
  std::int64_t seq = 0;  // monotone enqueue counter, FIFO tiebreak
};

// Mutable cluster snapshot the engine and the policy functions operate on.
struct ClusterState {
  const InstanceIndex* index = nullptr;
  ClusterConfig cluster;
  std::vector<EnvState> envs;                  // env_id == position
  std::vector<std::vector<int>> machine_envs;  // resident env ids per machine
  std::vector<Res> machine_free;
  std::vector<QueuedTask> queue;               // seq order
  std::int64_t seq_counter = 0;

  const Instance& instance() const { return index->instance(); }

  Res free_on(int machine) const { return machine_free[static_cast<std::size_t>(machine)]; }

  EnvState& create_env(int family, int machine, Time t) {
    EnvState e;
    e.env_id = static_cast<int>(envs.size());
    e.family = family;
    e.machine = machine;
    e.created_at = t;
    e.init_done = t + instance().family(family).setup;
    e.ready = e.init_done;
    e.last_use = t;
    machine_free[static_cast<std::size_t>(machine)] -= instance().family(family).size;
    machine_envs[static_cast<std::size_t>(machine)].push_back(e.env_id);
    envs.push_back(e);
    return envs.back();
  }

  void remove_env(int env_id, Time t) {
    EnvState& e = envs[static_cast<std::size_t>(env_id)];
    e.removed_at = t;
    machine_free[static_cast<std::size_t>(e.machine)] += instance().family(e.family).size;
    auto& resident = machine_envs[static_cast<std::size_t>(e.machine)];
    std::erase(resident, env_id);
  }
};

struct TaskRecord {
  int task = 0;
  int job = 0;
  int family = 0;
  int machine = 0;
  int env = 0;
  Time release = 0;
  Time start = 0;
  Time end = 0;
};

struct EnvRecord {
  int env = 0;
  int family = 0;
  int machine = 0;
  Time created = 0;
  Time init_done = 0;
  std::optional<Time> removed;
};

struct SimResult;

// Flattens environment histories into a SimResult; tasks sorted by id,
// job latencies recomputed as max task end per job.
SimResult collect_result(const ClusterState& state, const InstanceIndex& index,
                         const std::string& policy, double wall_seconds);

struct SimResult {
  std::string policy;
  std::string instance_id;
  int machines = 0;
  Res capacity = 0;
  std::uint64_t seed = 0;
  std::vector<TaskRecord> tasks;  // ascending task id
  std::vector<EnvRecord> envs;    // ascending env id
  std::map<int, Time> job_latencies;
  double wall_seconds = 0.0;
};

}  // namespace faas
