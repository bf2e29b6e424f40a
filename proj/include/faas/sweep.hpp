#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "faas/model.hpp"

namespace faas {

// Grid description for an experiment sweep: every (family count, setup
// range, chain range) cell is populated with instances_per_cell generated
// instances, each evaluated on every (machines, capacity) pair and policy.
struct SweepSpec {
  std::vector<int> families;
  std::vector<std::pair<Time, Time>> setups;
  std::vector<std::pair<int, int>> chains;
  std::vector<int> machines;
  std::vector<Res> capacities;
  int instances_per_cell = 20;
  int tasks = 1000;
  bool dag = false;
  std::vector<std::string> policies;
  std::uint64_t base_seed = 1;

  std::size_t total_runs() const {
    return families.size() * setups.size() * chains.size() *
           static_cast<std::size_t>(instances_per_cell) * machines.size() *
           capacities.size() * policies.size();
  }
};

SweepSpec parse_sweep_spec(const std::string& json_text);
std::optional<SweepSpec> preset_spec(const std::string& name);  // "paper-grid", "desk"

// One aggregate CSV row.
struct SweepRow {
  std::string instance_id;
  std::uint64_t seed = 0;  // per-row simulation seed
  int n_f = 0;
  Time s_min = 0, s_max = 0;
  int l_min = 0, l_max = 0;
  int m = 0;
  Res capacity = 0;
  std::string policy;
  double mean_latency = 0;
  Time p95_latency = 0;
};

std::string sweep_csv_header();
std::string sweep_row_to_csv(const SweepRow& row);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

// Shortest round-trip decimal form; keeps CSV output byte-stable.
std::string format_double(double value);

// Stable per-cell seeds, reproducible in isolation from the row coordinates.
std::uint64_t instance_seed(const SweepSpec& spec, int n_f, Time s_min, Time s_max,
                            int l_min, int l_max, int instance_idx);
std::uint64_t simulation_seed(std::uint64_t inst_seed, int m, Res capacity,
                              const std::string& policy);

std::string sweep_instance_id(bool dag, int n_f, Time s_min, Time s_max, int l_min,
                              int l_max, std::uint64_t seed);

struct SweepOutcome {
  std::size_t planned = 0;
  std::size_t executed = 0;
  std::size_t skipped = 0;   // rows already present in the CSV
  std::size_t failures = 0;
};

// Runs all missing cells on `jobs` workers and appends rows in canonical
// grid order; identical spec + seed yields byte-identical CSV regardless of
// parallelism. Progress goes to `progress` (stderr in the CLI).
SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& csv_path,
                       int jobs, std::ostream& progress);

// Groups rows by everything except the varied dimension, normalizes each
// group by its minimum mean latency and emits one box-stat CSV row per
// variant value. vary: ordering | removal | wait | dependency | policy.
std::string report_csv(const std::vector<SweepRow>& rows, const std::string& vary);

}  // namespace faas
