#include "faas/index.hpp"

#include <algorithm>
#include <functional>

namespace faas {

InstanceIndex::InstanceIndex(const Instance& instance) : instance_(&instance) {
  for (const JobSpec& job : instance.jobs) {
    for (const TaskSpec& t : job.tasks) {
      TaskInfo info;
      info.spec = &t;
      info.job_id = job.id;
      tasks_.emplace(t.id, info);
      ++total_tasks_;
      if (t.preds.empty()) first_tasks_.push_back(t.id);
    }
  }
  // Successor lists, ascending by successor index within each job.
  for (const JobSpec& job : instance.jobs) {
    for (const TaskSpec& t : job.tasks) {
      for (int p : t.preds) tasks_.at(p).succs.push_back(t.id);
    }
    for (const TaskSpec& t : job.tasks) {
      auto& succs = tasks_.at(t.id).succs;
      std::sort(succs.begin(), succs.end(), [this](int a, int b) {
        return tasks_.at(a).spec->index < tasks_.at(b).spec->index;
      });
    }
  }
  // Remaining work = p of the task plus p of every descendant. Jobs are
  // out-trees, so a reverse-index sweep resolves all descendants.
  for (const JobSpec& job : instance.jobs) {
    for (auto it = job.tasks.rbegin(); it != job.tasks.rend(); ++it) {
      TaskInfo& info = tasks_.at(it->id);
      Time total = instance.family(it->family).duration;
      for (int s : info.succs) total += tasks_.at(s).remaining_work;
      info.remaining_work = total;
    }
  }
}

}  // namespace faas
