#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace faas {

using Time = std::int64_t;
using Res = std::int64_t;

// One function family: identical invocations sharing an environment type,
// duration, resource footprint and setup (cold-start) time.
struct FamilySpec {
  int id = 0;       // 1-based, dense
  Time duration = 1;
  Res size = 1;
  Time setup = 0;
};

struct TaskSpec {
  int id = 0;       // globally unique
  int job = 0;
  int index = 0;    // 1-based position within the job
  int family = 0;
  std::vector<int> preds;  // task ids within the same job
};

struct JobSpec {
  int id = 0;
  std::vector<TaskSpec> tasks;  // array order defines index order
};

struct GenMeta {
  std::map<std::string, std::string> fields;  // free-form provenance
};

struct Instance {
  std::vector<FamilySpec> families;  // sorted by id, ids are 1..n_f
  std::vector<JobSpec> jobs;
  GenMeta meta;

  const FamilySpec& family(int id) const { return families.at(static_cast<std::size_t>(id) - 1); }
  int num_jobs() const { return static_cast<int>(jobs.size()); }
  int num_tasks() const {
    int n = 0;
    for (const auto& j : jobs) n += static_cast<int>(j.tasks.size());
    return n;
  }
};

struct ClusterConfig {
  int machines = 1;
  Res capacity = 1;
};

enum class Ordering { FIFO, EF, SJF, SW, RT };
enum class Removal { LRU, MinTime, MinFamily };
enum class DepMode { Def, Start, Stbr };

// Either the OW baseline, or the (ordering, removal, wait, dependency) tuple.
struct PolicyConfig {
  bool ow = false;
  Ordering ordering = Ordering::FIFO;
  Removal removal = Removal::LRU;
  bool wait = false;
  DepMode dep = DepMode::Def;

  // String encoding shared by CLI and CSV: "OW" or
  // "<ordering>,<removal>,<wait|nowait>,<def|start|stbr>".
  static std::optional<PolicyConfig> parse(const std::string& text);
  std::string str() const;

  static PolicyConfig make_ow() {
    PolicyConfig p;
    p.ow = true;
    return p;
  }
  static PolicyConfig tuple(Ordering o, Removal r, bool wait, DepMode d) {
    PolicyConfig p;
    p.ordering = o;
    p.removal = r;
    p.wait = wait;
    p.dep = d;
    return p;
  }

  bool operator==(const PolicyConfig& other) const {
    if (ow != other.ow) return false;
    if (ow) return true;
    return ordering == other.ordering && removal == other.removal &&
           wait == other.wait && dep == other.dep;
  }
};

const char* to_string(Ordering o);
const char* to_string(Removal r);
const char* to_string(DepMode d);

// All 90 tuple combinations, in (ordering, removal, wait, dep) order.
std::vector<PolicyConfig> all_tuple_policies();

// Structural validation; violations are data, not faults. Empty == valid.
std::vector<std::string> validate_instance(const Instance& instance);

struct InfeasibleInstance : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DeadlockError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace faas
