#pragma once

#include <unordered_map>
#include <vector>

#include "faas/model.hpp"

namespace faas {

// Lookup structures derived once per instance and shared by the engine,
// the policies and the metrics oracle.
struct InstanceIndex {
  struct TaskInfo {
    const TaskSpec* spec = nullptr;
    int job_id = 0;
    std::vector<int> succs;   // task ids, ascending index
    Time remaining_work = 0;  // duration of the task plus all its descendants
  };

  explicit InstanceIndex(const Instance& instance);

  const TaskInfo& info(int task_id) const { return tasks_.at(task_id); }
  const TaskSpec& task(int task_id) const { return *tasks_.at(task_id).spec; }
  const std::vector<int>& first_tasks() const { return first_tasks_; }
  int total_tasks() const { return total_tasks_; }
  const Instance& instance() const { return *instance_; }

 private:
  const Instance* instance_;
  std::unordered_map<int, TaskInfo> tasks_;
  std::vector<int> first_tasks_;  // tasks with no predecessors, (job, index) order
  int total_tasks_ = 0;
};

}  // namespace faas
