#pragma once

#include <array>
#include <vector>

#include "faas/model.hpp"

namespace faas::testing {

// Builds an instance from family triples (duration, setup, size) and jobs
// given as chains of family ids. Task ids are assigned sequentially from 1.
inline Instance make_instance(const std::vector<std::array<Time, 3>>& family_specs,
                              const std::vector<std::vector<int>>& chains) {
  Instance instance;
  int fid = 1;
  for (const auto& [p, s, q] : family_specs) {
    FamilySpec f;
    f.id = fid++;
    f.duration = p;
    f.setup = s;
    f.size = q;
    instance.families.push_back(f);
  }
  int task_id = 1;
  int job_id = 1;
  for (const auto& chain : chains) {
    JobSpec job;
    job.id = job_id++;
    for (std::size_t k = 0; k < chain.size(); ++k) {
      TaskSpec t;
      t.id = task_id++;
      t.job = job.id;
      t.index = static_cast<int>(k) + 1;
      t.family = chain[k];
      if (k > 0) t.preds.push_back(job.tasks.back().id);
      job.tasks.push_back(t);
    }
    instance.jobs.push_back(job);
  }
  return instance;
}

// The two-job waiting scenario: f1(p=10,s=1,q=1), f2(p=10,s=100,q=1);
// J1 = [C(f2)], J2 = [A(f1) -> B(f2)]; m=1, Q=2.
inline Instance wait_example_instance() {
  return make_instance({{10, 1, 1}, {10, 100, 1}}, {{2}, {1, 2}});
}

}  // namespace faas::testing
