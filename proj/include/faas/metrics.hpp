#pragma once

#include <map>
#include <string>
#include <vector>

#include "faas/model.hpp"
#include "faas/state.hpp"

namespace faas {

struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IncompleteGroup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sum of job latencies; mean == total / N with exact integer numerator.
Time total_latency(const SimResult& result);
double mean_latency(const SimResult& result);

// Nearest-rank percentile: the ceil(p/100 * N)-th smallest job latency.
Time percentile_latency(const SimResult& result, double percent);

// Checks the three model constraints plus structural consistency; empty
// report == valid schedule. Violations are data, not faults.
std::vector<std::string> validate_schedule(const Instance& instance,
                                           const ClusterConfig& cluster,
                                           const SimResult& result);

struct OptimalResult {
  Time total = 0;   // minimal sum of job latencies
  double mean = 0;  // total / N
};

// Exhaustive enumeration over the event-decision space; tiny instances only
// (n <= 6 tasks, m <= 2). Certifies engine semantics, not a benchmark.
OptimalResult brute_force_optimal(const Instance& instance, const ClusterConfig& cluster);

// Divides every value in the group by the group minimum (minimum -> 1.0).
std::vector<double> normalize_relative(const std::vector<double>& group);

struct BoxStats {
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double whisker_lo = 0;  // most extreme data point within 1.5*IQR of the box
  double whisker_hi = 0;
  std::vector<double> outliers;
};

// Quartiles by linear interpolation between closest ranks.
BoxStats box_stats(std::vector<double> values);

double median_of(std::vector<double> values);

}  // namespace faas
