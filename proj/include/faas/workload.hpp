#pragma once

#include <cstdint>
#include <string>

#include "faas/model.hpp"

namespace faas {

struct InvalidParams : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotAChain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenParams {
  int tasks = 1000;
  int families = 50;
  Time setup_min = 10;
  Time setup_max = 20;
  int chain_min = 10;
  int chain_max = 20;
  Time duration_min = 1;
  Time duration_max = 10;
  Res size_min = 1;
  Res size_max = 10;
  std::uint64_t seed = 0;
};

// Random chain instance: family parameters drawn uniformly, tasks assigned
// uniform families, then partitioned into jobs of uniform random length and
// arranged in random chain order. Deterministic given the seed.
Instance generate_chain_instance(const GenParams& params);

// Rewires each chain job into a random out-tree: every task at index >= 2
// receives one parent drawn uniformly from the smaller-index tasks of the
// same job. Only preds change.
Instance dagify_instance(const Instance& chain_instance, std::uint64_t seed);

}  // namespace faas
