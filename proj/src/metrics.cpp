#include "faas/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "faas/index.hpp"

namespace faas {

Time total_latency(const SimResult& result) {
  Time total = 0;
  for (const auto& [job, c] : result.job_latencies) total += c;
  return total;
}

double mean_latency(const SimResult& result) {
  if (result.job_latencies.empty()) return 0.0;
  return static_cast<double>(total_latency(result)) /
         static_cast<double>(result.job_latencies.size());
}

Time percentile_latency(const SimResult& result, double percent) {
  std::vector<Time> values;
  values.reserve(result.job_latencies.size());
  for (const auto& [job, c] : result.job_latencies) values.push_back(c);
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(percent / 100.0 * n));
  if (rank < 1) rank = 1;
  if (rank > values.size()) rank = values.size();
  return values[rank - 1];
}

std::vector<std::string> validate_schedule(const Instance& instance,
                                           const ClusterConfig& cluster,
                                           const SimResult& result) {
  std::vector<std::string> report;
  auto add = [&report](const std::string& msg) { report.push_back(msg); };
  InstanceIndex index(instance);

  std::unordered_map<int, const TaskRecord*> by_task;
  for (const TaskRecord& t : result.tasks) {
    if (!by_task.emplace(t.task, &t).second)
      add("task " + std::to_string(t.task) + " scheduled more than once");
  }
  for (const JobSpec& job : instance.jobs) {
    for (const TaskSpec& t : job.tasks) {
      if (!by_task.count(t.id)) add("task " + std::to_string(t.id) + " never scheduled");
    }
  }

  std::unordered_map<int, const EnvRecord*> by_env;
  for (const EnvRecord& e : result.envs) {
    by_env.emplace(e.env, &e);
    if (e.machine < 0 || e.machine >= cluster.machines)
      add("env " + std::to_string(e.env) + " on unknown machine " + std::to_string(e.machine));
  }

  for (const TaskRecord& t : result.tasks) {
    const TaskSpec& spec = index.task(t.task);
    const FamilySpec& fam = instance.family(spec.family);
    if (t.family != spec.family)
      add("task " + std::to_string(t.task) + " family mismatch");
    if (t.end - t.start != fam.duration)
      add("task " + std::to_string(t.task) + " interval length != duration");
    for (int p : spec.preds) {
      auto it = by_task.find(p);
      if (it != by_task.end() && t.start < it->second->end)
        add("task " + std::to_string(t.task) + " starts before predecessor " +
            std::to_string(p) + " ends (dependency violation)");
    }
    auto env_it = by_env.find(t.env);
    if (env_it == by_env.end()) {
      add("task " + std::to_string(t.task) + " on unknown env " + std::to_string(t.env));
      continue;
    }
    const EnvRecord& env = *env_it->second;
    if (env.family != spec.family)
      add("task " + std::to_string(t.task) + " hosted by env of wrong family");
    if (env.machine != t.machine)
      add("task " + std::to_string(t.task) + " machine disagrees with its env");
    if (t.start < env.init_done)
      add("task " + std::to_string(t.task) + " starts before env init completes");
  }

  // Per-environment disjoint execution intervals.
  std::unordered_map<int, std::vector<const TaskRecord*>> env_tasks;
  for (const TaskRecord& t : result.tasks) env_tasks[t.env].push_back(&t);
  for (auto& [env_id, tasks] : env_tasks) {
    std::sort(tasks.begin(), tasks.end(),
              [](const TaskRecord* a, const TaskRecord* b) { return a->start < b->start; });
    for (std::size_t i = 1; i < tasks.size(); ++i) {
      if (tasks[i]->start < tasks[i - 1]->end)
        add("env " + std::to_string(env_id) + " executes tasks " +
            std::to_string(tasks[i - 1]->task) + " and " + std::to_string(tasks[i]->task) +
            " concurrently");
    }
  }

  // Multiple-knapsack constraint, checked at every creation boundary. An
  // environment is resident over [created, removed).
  for (int m = 0; m < cluster.machines; ++m) {
    std::vector<const EnvRecord*> here;
    for (const EnvRecord& e : result.envs) {
      if (e.machine == m) here.push_back(&e);
    }
    for (const EnvRecord* boundary : here) {
      const Time at = boundary->created;
      Res used = 0;
      for (const EnvRecord* e : here) {
        if (e->created <= at && (!e->removed || *e->removed > at))
          used += instance.family(e->family).size;
      }
      if (used > cluster.capacity)
        add("machine " + std::to_string(m) + " over capacity at time " + std::to_string(at) +
            " (" + std::to_string(used) + " > " + std::to_string(cluster.capacity) + ")");
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle

namespace {

constexpr Time kInfeasible = std::numeric_limits<Time>::max() / 4;

struct BfTask {
  int family = 0;
  int job = 0;
  std::vector<int> preds;  // positions
};

struct BfEnv {
  int family = 0;
  int machine = 0;
  Time init_done = 0;
  Time ready = 0;
};

struct Oracle {
  const Instance* instance = nullptr;
  ClusterConfig cluster;
  std::vector<BfTask> tasks;
  int max_creations = 0;
  Time best_global = kInfeasible;
  std::unordered_map<std::string, Time> memo;

  struct State {
    Time t = 0;
    std::vector<Time> end;  // -1 == unassigned
    std::vector<BfEnv> envs;
    int creations = 0;
  };

  std::string key(const State& s) const {
    std::ostringstream os;
    os << s.t << '|' << s.creations << '|';
    for (Time e : s.end) os << e << ',';
    os << '|';
    std::vector<BfEnv> sorted = s.envs;
    std::sort(sorted.begin(), sorted.end(), [](const BfEnv& a, const BfEnv& b) {
      return std::tie(a.machine, a.family, a.init_done, a.ready) <
             std::tie(b.machine, b.family, b.init_done, b.ready);
    });
    for (const BfEnv& e : sorted)
      os << e.machine << ':' << e.family << ':' << e.init_done << ':' << e.ready << ';';
    return os.str();
  }

  Time terminal_total(const State& s) const {
    std::map<int, Time> per_job;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      auto [it, inserted] = per_job.try_emplace(tasks[i].job, s.end[i]);
      if (!inserted) it->second = std::max(it->second, s.end[i]);
    }
    Time total = 0;
    for (const auto& [job, c] : per_job) total += c;
    return total;
  }

  // Admissible bound on the total: assigned ends are fixed; an unassigned
  // task cannot finish before its precedence-relaxed earliest end, through
  // either the soonest live env of its family or a fresh env built >= t.
  Time lower_bound(const State& s) const {
    std::vector<Time> earliest(tasks.size(), 0);
    std::map<int, Time> per_job;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      Time e;
      if (s.end[i] >= 0) {
        e = s.end[i];
      } else {
        const FamilySpec& fam = instance->family(tasks[i].family);
        Time avail = s.t + fam.setup;
        for (const BfEnv& env : s.envs) {
          if (env.family == tasks[i].family) avail = std::min(avail, env.ready);
        }
        Time release = 0;
        for (int p : tasks[i].preds)
          release = std::max(release, earliest[static_cast<std::size_t>(p)]);
        e = std::max(avail, release) + fam.duration;
      }
      earliest[i] = e;
      auto [it, inserted] = per_job.try_emplace(tasks[i].job, e);
      if (!inserted) it->second = std::max(it->second, e);
    }
    Time total = 0;
    for (const auto& [job, c] : per_job) total += c;
    return total;
  }

  Time solve(const State& s) {
    if (std::all_of(s.end.begin(), s.end.end(), [](Time e) { return e >= 0; })) {
      const Time total = terminal_total(s);
      best_global = std::min(best_global, total);
      return total;
    }
    if (lower_bound(s) >= best_global) return kInfeasible;  // cannot improve

    const std::string k = key(s);
    if (auto it = memo.find(k); it != memo.end()) return it->second;
    memo.emplace(k, kInfeasible);  // cycle guard; overwritten below
    Time best = kInfeasible;

    // Assign a ready task to an existing environment of its family.
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (s.end[i] >= 0) continue;
      Time release = 0;
      bool ready = true;
      for (int p : tasks[i].preds) {
        if (s.end[static_cast<std::size_t>(p)] < 0) {
          ready = false;
          break;
        }
        release = std::max(release, s.end[static_cast<std::size_t>(p)]);
      }
      if (!ready) continue;
      const FamilySpec& fam = instance->family(tasks[i].family);
      for (std::size_t e = 0; e < s.envs.size(); ++e) {
        if (s.envs[e].family != tasks[i].family) continue;
        State next = s;
        const Time start = std::max(next.envs[e].ready, release);
        next.end[i] = start + fam.duration;
        next.envs[e].ready = next.end[i];
        best = std::min(best, solve(next));
      }
    }

    // Create an environment, optionally evicting a removable subset.
    if (s.creations < max_creations) {
      std::map<int, int> unassigned_per_family;
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (s.end[i] < 0) ++unassigned_per_family[tasks[i].family];
      }
      for (const auto& [family, pending] : unassigned_per_family) {
        int live = 0;
        for (const BfEnv& e : s.envs) {
          if (e.family == family) ++live;
        }
        if (live >= pending) continue;  // extra environments cannot help
        const FamilySpec& fam = instance->family(family);
        for (int m = 0; m < cluster.machines; ++m) {
          Res used = 0;
          std::vector<std::size_t> removable;  // idle == ready <= t
          for (std::size_t e = 0; e < s.envs.size(); ++e) {
            if (s.envs[e].machine != m) continue;
            used += instance->family(s.envs[e].family).size;
            if (s.envs[e].ready <= s.t) removable.push_back(e);
          }
          const Res free_now = cluster.capacity - used;
          const auto subsets = std::size_t{1} << removable.size();
          auto fits = [&](std::size_t mask) {
            Res freed = free_now;
            for (std::size_t b = 0; b < removable.size(); ++b) {
              if (mask & (std::size_t{1} << b))
                freed += instance->family(s.envs[removable[b]].family).size;
            }
            return freed >= fam.size;
          };
          for (std::size_t mask = 0; mask < subsets; ++mask) {
            if (!fits(mask)) continue;
            // Only inclusion-minimal eviction sets: leaving an idle env
            // alive dominates evicting it (it stays evictable later).
            bool minimal = true;
            for (std::size_t b = 0; b < removable.size() && minimal; ++b) {
              if ((mask & (std::size_t{1} << b)) && fits(mask & ~(std::size_t{1} << b)))
                minimal = false;
            }
            if (!minimal) continue;
            State next = s;
            std::vector<std::size_t> evict;
            for (std::size_t b = 0; b < removable.size(); ++b) {
              if (mask & (std::size_t{1} << b)) evict.push_back(removable[b]);
            }
            for (auto it = evict.rbegin(); it != evict.rend(); ++it)
              next.envs.erase(next.envs.begin() + static_cast<std::ptrdiff_t>(*it));
            BfEnv env;
            env.family = family;
            env.machine = m;
            env.init_done = s.t + fam.setup;
            env.ready = env.init_done;
            next.envs.push_back(env);
            ++next.creations;
            best = std::min(best, solve(next));
          }
        }
      }
    }

    // Delay to the next event.
    Time next_t = kInfeasible;
    for (Time e : s.end) {
      if (e > s.t && e < next_t) next_t = e;
    }
    for (const BfEnv& e : s.envs) {
      if (e.ready > s.t && e.ready < next_t) next_t = e.ready;
      if (e.init_done > s.t && e.init_done < next_t) next_t = e.init_done;
    }
    if (next_t < kInfeasible) {
      State next = s;
      next.t = next_t;
      best = std::min(best, solve(next));
    }

    memo[k] = best;
    return best;
  }
};

}  // namespace

OptimalResult brute_force_optimal(const Instance& instance, const ClusterConfig& cluster) {
  const int n = instance.num_tasks();
  if (n > 6 || cluster.machines > 2)
    throw TooLarge("oracle limits: n <= 6 tasks, m <= 2 machines");
  for (const FamilySpec& f : instance.families) {
    if (f.size > cluster.capacity)
      throw InfeasibleInstance("family " + std::to_string(f.id) +
                               " size exceeds machine capacity");
  }

  Oracle oracle;
  oracle.instance = &instance;
  oracle.cluster = cluster;
  // Some optimal schedule creates at most one env per task: an env hosting
  // no task only consumes capacity.
  oracle.max_creations = n;

  std::unordered_map<int, int> position;
  for (const JobSpec& job : instance.jobs) {
    for (const TaskSpec& t : job.tasks) {
      position[t.id] = static_cast<int>(oracle.tasks.size());
      BfTask bt;
      bt.family = t.family;
      bt.job = job.id;
      oracle.tasks.push_back(bt);
    }
  }
  for (const JobSpec& job : instance.jobs) {
    for (const TaskSpec& t : job.tasks) {
      for (int p : t.preds)
        oracle.tasks[static_cast<std::size_t>(position[t.id])].preds.push_back(position[p]);
    }
  }

  Oracle::State initial;
  initial.end.assign(oracle.tasks.size(), -1);
  oracle.solve(initial);
  const Time total = oracle.best_global;
  if (total >= kInfeasible)
    throw InfeasibleInstance("oracle found no feasible schedule");
  OptimalResult out;
  out.total = total;
  out.mean = static_cast<double>(total) / static_cast<double>(instance.num_jobs());
  return out;
}

std::vector<double> normalize_relative(const std::vector<double>& group) {
  if (group.empty()) throw IncompleteGroup("empty normalization group");
  const double lo = *std::min_element(group.begin(), group.end());
  std::vector<double> out;
  out.reserve(group.size());
  for (double v : group) out.push_back(lo == 0.0 ? 1.0 : v / lo);
  return out;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted.front();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("box_stats: empty input");
  std::sort(values.begin(), values.end());
  BoxStats box;
  box.q1 = quantile_sorted(values, 0.25);
  box.median = quantile_sorted(values, 0.5);
  box.q3 = quantile_sorted(values, 0.75);
  const double iqr = box.q3 - box.q1;
  const double lo_fence = box.q1 - 1.5 * iqr;
  const double hi_fence = box.q3 + 1.5 * iqr;
  box.whisker_lo = values.back();
  box.whisker_hi = values.front();
  for (double v : values) {
    if (v >= lo_fence && v <= hi_fence) {
      box.whisker_lo = std::min(box.whisker_lo, v);
      box.whisker_hi = std::max(box.whisker_hi, v);
    } else {
      box.outliers.push_back(v);
    }
  }
  return box;
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median_of: empty input");
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

}  // namespace faas
