#pragma once

#include <optional>
#include <vector>

#include "faas/rng.hpp"
#include "faas/state.hpp"

namespace faas {

// Reorders a queue snapshot according to the ordering policy. All orderings
// are stable permutations (seq breaks ties); the EF partition is computed
// once from the state at call time.
std::vector<QueuedTask> order_queue(Ordering ordering,
                                    const std::vector<QueuedTask>& queue,
                                    const ClusterState& state);

// Duration of the task plus all its descendants within the job; for chains
// this is the plain suffix sum.
Time remaining_work(int task_id, const InstanceIndex& index);

struct RemovalSelection {
  int machine = 0;
  std::vector<int> victims;  // env ids, eviction order
};

// Picks a machine and a victim set freeing at least q_needed according to
// the removal policy. nullopt when no machine can be made to fit.
std::optional<RemovalSelection> select_removals(Removal removal,
                                                const ClusterState& state,
                                                int family, Res q_needed);

// Uniform over {k in [1, m) : gcd(k, m) == 1}; 1 when m <= 2.
int coprime_step(int m, Rng& rng);

// The OpenWhisk-style baseline: per-family hash routing emulated by seeded
// uniform draws, per-machine overflow queues, LRU eviction.
SimResult ow_simulate(const Instance& instance, const ClusterConfig& cluster,
                      std::uint64_t seed);

}  // namespace faas
