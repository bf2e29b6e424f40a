#pragma once

#include <unordered_map>
#include <vector>

#include "faas/state.hpp"

namespace faas {

// Event-driven execution of the framework scheduling algorithm. Events are
// task completions only; assignments fix timelines deterministically, so
// environment initializations need no events of their own.
class Simulation {
 public:
  Simulation(const InstanceIndex& index, ClusterConfig cluster, PolicyConfig policy);

  SimResult run();

  // Exposed for unit tests; all return env ids, -1 meaning "none".
  int find_unused_environment(int task_id) const;
  int find_environment_to_wait(int task_id, Time t) const;
  int place_new_environment(int task_id, Time t);
  int remove_and_place_environment(int task_id, Time t);
  void assign_task(int env_id, int task_id, Time release);
  Time projected_completion(int env_id) const { return state_.envs[static_cast<std::size_t>(env_id)].ready; }

  void enqueue(int task_id, Time release);
  // completed_now: tasks whose completion was recorded at t, (job, index) order.
  void scheduling_step(Time t, const std::vector<int>& completed_now);

  ClusterState& state() { return state_; }
  const ClusterState& state() const { return state_; }

 private:
  enum class TaskStatus { NotReady, Queued, Assigned, Completed };

  // Enqueues successors of `task_id` whose full predecessor set satisfies
  // `pred_done`; release = max predecessor projected completion.
  // Returns the number of successors enqueued.
  int queue_dependent_tasks(int task_id);
  bool pred_times_known(int task_id) const;
  Time release_from_preds(int task_id) const;
  void record_completions_until(Time t, std::vector<int>* completed_now);
  Time next_event_after(Time t) const;
  SimResult build_result(double wall_seconds) const;

  const InstanceIndex& index_;
  PolicyConfig policy_;
  ClusterState state_;
  std::unordered_map<int, TaskStatus> status_;
  std::unordered_map<int, Time> completion_;  // exact ends, known at assignment
  std::unordered_map<int, const EnvState::Slot*> slot_of_;
  std::unordered_map<int, int> env_of_;
  int completed_count_ = 0;
};

// Runs the full simulation; dispatches to ow_simulate for the OW baseline.
// The tuple policies consume no randomness; the seed is recorded for
// provenance and drives only OW.
SimResult simulate(const Instance& instance, const ClusterConfig& cluster,
                   const PolicyConfig& policy, std::uint64_t seed);

}  // namespace faas
