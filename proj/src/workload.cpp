#include "faas/workload.hpp"

#include <algorithm>
#include <vector>

#include "faas/rng.hpp"

namespace faas {

namespace {

void check_params(const GenParams& p) {
  if (p.tasks < 1) throw InvalidParams("tasks must be >= 1");
  if (p.families < 1) throw InvalidParams("families must be >= 1");
  if (p.chain_min < 1 || p.chain_min > p.chain_max || p.chain_max > p.tasks)
    throw InvalidParams("chain range must satisfy 1 <= min <= max <= tasks");
  if (p.setup_min < 0 || p.setup_min > p.setup_max)
    throw InvalidParams("setup range must satisfy 0 <= min <= max");
  if (p.duration_min < 1 || p.duration_min > p.duration_max)
    throw InvalidParams("duration range must satisfy 1 <= min <= max");
  if (p.size_min < 1 || p.size_min > p.size_max)
    throw InvalidParams("size range must satisfy 1 <= min <= max");
}

}  // namespace

Instance generate_chain_instance(const GenParams& params) {
  check_params(params);
  Rng rng(params.seed);

  Instance instance;
  for (int f = 1; f <= params.families; ++f) {
    FamilySpec spec;
    spec.id = f;
    spec.setup = rng.uniform(params.setup_min, params.setup_max);
    spec.duration = rng.uniform(params.duration_min, params.duration_max);
    spec.size = rng.uniform(params.size_min, params.size_max);
    instance.families.push_back(spec);
  }

  std::vector<int> task_family(static_cast<std::size_t>(params.tasks));
  for (auto& f : task_family) f = static_cast<int>(rng.uniform(1, params.families));

  // Partition tasks into jobs: draw a length, pick that many unassigned
  // tasks uniformly and keep them in the drawn (random) sequence. The last
  // job takes whatever remains and may be shorter.
  std::vector<int> unassigned(task_family.size());
  for (std::size_t i = 0; i < unassigned.size(); ++i) unassigned[i] = static_cast<int>(i);

  int next_task_id = 1;
  int next_job_id = 1;
  while (!unassigned.empty()) {
    const auto want = static_cast<std::size_t>(rng.uniform(params.chain_min, params.chain_max));
    const std::size_t take = std::min(want, unassigned.size());
    for (std::size_t j = 0; j < take; ++j) {
      const std::size_t pick =
          j + static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(unassigned.size() - j) - 1));
      std::swap(unassigned[j], unassigned[pick]);
    }
    JobSpec job;
    job.id = next_job_id++;
    for (std::size_t j = 0; j < take; ++j) {
      TaskSpec t;
      t.id = next_task_id++;
      t.job = job.id;
      t.index = static_cast<int>(j) + 1;
      t.family = task_family[static_cast<std::size_t>(unassigned[j])];
      if (j > 0) t.preds.push_back(job.tasks.back().id);
      job.tasks.push_back(t);
    }
    unassigned.erase(unassigned.begin(), unassigned.begin() + static_cast<std::ptrdiff_t>(take));
    instance.jobs.push_back(std::move(job));
  }

  instance.meta.fields["kind"] = "chain";
  instance.meta.fields["tasks"] = std::to_string(params.tasks);
  instance.meta.fields["families"] = std::to_string(params.families);
  instance.meta.fields["setup_min"] = std::to_string(params.setup_min);
  instance.meta.fields["setup_max"] = std::to_string(params.setup_max);
  instance.meta.fields["chain_min"] = std::to_string(params.chain_min);
  instance.meta.fields["chain_max"] = std::to_string(params.chain_max);
  instance.meta.fields["seed"] = std::to_string(params.seed);
  return instance;
}

Instance dagify_instance(const Instance& chain_instance, std::uint64_t seed) {
  for (const JobSpec& job : chain_instance.jobs) {
    for (std::size_t k = 0; k < job.tasks.size(); ++k) {
      const TaskSpec& t = job.tasks[k];
      const bool chain_shape =
          (k == 0) ? t.preds.empty()
                   : (t.preds.size() == 1 && t.preds[0] == job.tasks[k - 1].id);
      if (!chain_shape)
        throw NotAChain("task " + std::to_string(t.id) + " is not chain-shaped");
    }
  }

  Rng rng(seed);
  Instance out = chain_instance;
  for (JobSpec& job : out.jobs) {
    for (std::size_t k = 1; k < job.tasks.size(); ++k) {
      const auto parent =
          static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(k) - 1));
      job.tasks[k].preds = {job.tasks[parent].id};
    }
  }
  out.meta.fields["kind"] = "dag";
  out.meta.fields["dag_seed"] = std::to_string(seed);
  return out;
}

}  // namespace faas
