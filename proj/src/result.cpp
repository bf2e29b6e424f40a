#include <algorithm>

#include "faas/state.hpp"

namespace faas {

SimResult collect_result(const ClusterState& state, const InstanceIndex& index,
                         const std::string& policy, double wall_seconds) {
  SimResult result;
  result.policy = policy;
  result.machines = state.cluster.machines;
  result.capacity = state.cluster.capacity;
  result.wall_seconds = wall_seconds;

  for (const EnvState& e : state.envs) {
    EnvRecord rec;
    rec.env = e.env_id;
    rec.family = e.family;
    rec.machine = e.machine;
    rec.created = e.created_at;
    rec.init_done = e.init_done;
    rec.removed = e.removed_at;
    result.envs.push_back(rec);

    for (const EnvState::Slot& slot : e.history) {
      TaskRecord tr;
      tr.task = slot.task;
      tr.job = index.info(slot.task).job_id;
      tr.family = e.family;
      tr.machine = e.machine;
      tr.env = e.env_id;
      tr.release = slot.release;
      tr.start = slot.start;
      tr.end = slot.end;
      result.tasks.push_back(tr);
    }
  }
  std::sort(result.tasks.begin(), result.tasks.end(),
            [](const TaskRecord& a, const TaskRecord& b) { return a.task < b.task; });
  for (const TaskRecord& tr : result.tasks) {
    auto [it, inserted] = result.job_latencies.try_emplace(tr.job, tr.end);
    if (!inserted) it->second = std::max(it->second, tr.end);
  }
  return result;
}

}  // namespace faas
