#include "faas/sweep.hpp"

#include <atomic>
#include <charconv>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "faas/engine.hpp"
#include "faas/io.hpp"
#include "faas/metrics.hpp"
#include "faas/rng.hpp"
#include "faas/workload.hpp"

namespace faas {

namespace {

using json = nlohmann::json;

std::pair<Time, Time> range_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2)
    throw ParseError(std::string(what) + ": expected [min, max]");
  return {j[0].get<Time>(), j[1].get<Time>()};
}

}  // namespace

SweepSpec parse_sweep_spec(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  SweepSpec spec;
  try {
    spec.families = root.at("families").get<std::vector<int>>();
    for (const json& s : root.at("setups")) spec.setups.push_back(range_from(s, "setups"));
    for (const json& c : root.at("chains")) {
      auto [lo, hi] = range_from(c, "chains");
      spec.chains.emplace_back(static_cast<int>(lo), static_cast<int>(hi));
    }
    spec.machines = root.at("machines").get<std::vector<int>>();
    spec.capacities = root.at("capacities").get<std::vector<Res>>();
    spec.instances_per_cell = root.value("instances_per_cell", 20);
    spec.tasks = root.value("tasks", 1000);
    spec.dag = root.value("dag", false);
    spec.policies = root.at("policies").get<std::vector<std::string>>();
    spec.base_seed = root.value("base_seed", std::uint64_t{1});
  } catch (const json::exception& e) {
    throw ParseError(std::string("sweep spec: ") + e.what());
  }
  if (spec.families.empty() || spec.setups.empty() || spec.chains.empty() ||
      spec.machines.empty() || spec.capacities.empty() || spec.policies.empty())
    throw ParseError("sweep spec: all dimension lists must be non-empty");
  for (const std::string& p : spec.policies) {
    if (!PolicyConfig::parse(p)) throw ParseError("sweep spec: bad policy \"" + p + "\"");
  }
  return spec;
}

std::optional<SweepSpec> preset_spec(const std::string& name) {
  if (name == "paper-grid") {
    SweepSpec spec;
    spec.families = {10, 20, 50, 100, 200, 500};
    spec.setups = {{0, 0}, {10, 20}, {100, 200}, {1000, 2000}};
    spec.chains = {{2, 10}, {10, 20}, {50, 100}};
    spec.machines = {2, 5, 10, 20, 50};
    spec.capacities = {10, 20, 50};
    spec.instances_per_cell = 20;
    spec.tasks = 1000;
    spec.policies.push_back("OW");
    for (const PolicyConfig& p : all_tuple_policies()) spec.policies.push_back(p.str());
    spec.base_seed = 1;
    return spec;
  }
  if (name == "desk") {
    SweepSpec spec;
    spec.families = {50};
    spec.setups = {{10, 20}};
    spec.chains = {{10, 20}};
    spec.machines = {20};
    spec.capacities = {10};
    spec.instances_per_cell = 5;
    spec.tasks = 1000;
    spec.policies = {"OW", "FIFO,LRU,nowait,def", "FIFO,LRU,nowait,start",
                     "EF,LRU,wait,def", "EF,LRU,wait,start"};
    spec.base_seed = 1;
    return spec;
  }
  return std::nullopt;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string sweep_csv_header() {
  return "instance_id,seed,n_f,s_min,s_max,l_min,l_max,m,Q,policy,mean_latency,p95_latency";
}

std::string sweep_row_to_csv(const SweepRow& r) {
  std::ostringstream os;
  os << r.instance_id << ',' << r.seed << ',' << r.n_f << ',' << r.s_min << ',' << r.s_max
     << ',' << r.l_min << ',' << r.l_max << ',' << r.m << ',' << r.capacity << ",\""
     << r.policy << "\"," << format_double(r.mean_latency) << ',' << r.p95_latency;
  return os.str();
}

namespace {

// Splits a CSV line honoring double-quoted fields (the policy column).
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<SweepRow> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("instance_id,", 0) == 0) continue;  // header
    }
    auto fields = split_csv(line);
    if (fields.size() != 12) throw ParseError("bad CSV row: " + line);
    SweepRow r;
    r.instance_id = fields[0];
    r.seed = std::stoull(fields[1]);
    r.n_f = std::stoi(fields[2]);
    r.s_min = std::stoll(fields[3]);
    r.s_max = std::stoll(fields[4]);
    r.l_min = std::stoi(fields[5]);
    r.l_max = std::stoi(fields[6]);
    r.m = std::stoi(fields[7]);
    r.capacity = std::stoll(fields[8]);
    r.policy = fields[9];
    r.mean_latency = std::stod(fields[10]);
    r.p95_latency = std::stoll(fields[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::uint64_t instance_seed(const SweepSpec& spec, int n_f, Time s_min, Time s_max,
                            int l_min, int l_max, int instance_idx) {
  std::ostringstream key;
  key << "gen|" << spec.base_seed << '|' << spec.tasks << '|' << n_f << '|' << s_min << '-'
      << s_max << '|' << l_min << '-' << l_max << '|' << instance_idx;
  return stable_hash(key.str());
}

std::uint64_t simulation_seed(std::uint64_t inst_seed, int m, Res capacity,
                              const std::string& policy) {
  std::ostringstream key;
  key << "sim|" << inst_seed << '|' << m << '|' << capacity << '|' << policy;
  return stable_hash(key.str());
}

std::string sweep_instance_id(bool dag, int n_f, Time s_min, Time s_max, int l_min,
                              int l_max, std::uint64_t seed) {
  std::ostringstream os;
  os << (dag ? "dag" : "chain") << "_nf" << n_f << "_s" << s_min << '-' << s_max << "_l"
     << l_min << '-' << l_max << "_seed" << seed;
  return os.str();
}

namespace {

struct InstanceUnit {
  int n_f = 0;
  Time s_min = 0, s_max = 0;
  int l_min = 0, l_max = 0;
  int instance_idx = 0;
  std::uint64_t gen_seed = 0;
  std::string instance_id;
};

}  // namespace

SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& csv_path,
                       int jobs, std::ostream& progress) {
  SweepOutcome outcome;
  outcome.planned = spec.total_runs();
  progress << "sweep: " << outcome.planned << " runs planned\n";

  std::set<std::string> existing;
  bool have_file = std::filesystem::exists(csv_path);
  if (have_file) {
    for (const SweepRow& r : read_sweep_csv(csv_path)) {
      existing.insert(r.instance_id + "|" + std::to_string(r.m) + "|" +
                      std::to_string(r.capacity) + "|" + r.policy);
    }
  }

  std::vector<InstanceUnit> units;
  for (int n_f : spec.families) {
    for (auto [s_min, s_max] : spec.setups) {
      for (auto [l_min, l_max] : spec.chains) {
        for (int i = 0; i < spec.instances_per_cell; ++i) {
          InstanceUnit u;
          u.n_f = n_f;
          u.s_min = s_min;
          u.s_max = s_max;
          u.l_min = l_min;
          u.l_max = l_max;
          u.instance_idx = i;
          u.gen_seed = instance_seed(spec, n_f, s_min, s_max, l_min, l_max, i);
          u.instance_id =
              sweep_instance_id(spec.dag, n_f, s_min, s_max, l_min, l_max, u.gen_seed);
          units.push_back(std::move(u));
        }
      }
    }
  }

  // Each worker claims whole instance units; rows land in per-unit slots so
  // the final append order is the canonical grid order.
  std::vector<std::vector<SweepRow>> unit_rows(units.size());
  std::vector<std::string> unit_errors(units.size());
  std::atomic<std::size_t> next_unit{0};
  std::atomic<std::size_t> executed{0};
  std::atomic<std::size_t> skipped{0};
  std::atomic<std::size_t> failures{0};
  std::mutex progress_mutex;

  auto worker = [&]() {
    while (true) {
      const std::size_t u = next_unit.fetch_add(1);
      if (u >= units.size()) return;
      const InstanceUnit& unit = units[u];
      try {
        GenParams params;
        params.tasks = spec.tasks;
        params.families = unit.n_f;
        params.setup_min = unit.s_min;
        params.setup_max = unit.s_max;
        params.chain_min = unit.l_min;
        params.chain_max = unit.l_max;
        params.seed = unit.gen_seed;
        Instance instance = generate_chain_instance(params);
        if (spec.dag) instance = dagify_instance(instance, derive_seed(unit.gen_seed, 0xda6));

        for (int m : spec.machines) {
          for (Res q : spec.capacities) {
            for (const std::string& policy_str : spec.policies) {
              const std::string key = unit.instance_id + "|" + std::to_string(m) + "|" +
                                      std::to_string(q) + "|" + policy_str;
              if (existing.count(key)) {
                ++skipped;
                continue;
              }
              const auto policy = PolicyConfig::parse(policy_str);
              const std::uint64_t sim_seed = simulation_seed(unit.gen_seed, m, q, policy_str);
              SimResult result = simulate(instance, ClusterConfig{m, q}, *policy, sim_seed);
              SweepRow row;
              row.instance_id = unit.instance_id;
              row.seed = sim_seed;
              row.n_f = unit.n_f;
              row.s_min = unit.s_min;
              row.s_max = unit.s_max;
              row.l_min = unit.l_min;
              row.l_max = unit.l_max;
              row.m = m;
              row.capacity = q;
              row.policy = policy_str;
              row.mean_latency = mean_latency(result);
              row.p95_latency = percentile_latency(result, 95.0);
              unit_rows[u].push_back(std::move(row));
              ++executed;
            }
          }
        }
      } catch (const std::exception& e) {
        ++failures;
        unit_errors[u] = e.what();
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress << "sweep: unit " << unit.instance_id << " failed: " << e.what() << "\n";
      }
      const std::size_t done = executed.load() + skipped.load();
      if (done % 500 < spec.machines.size() * spec.capacities.size() * spec.policies.size()) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress << "sweep: " << done << "/" << outcome.planned << " runs\n";
      }
    }
  };

  const int workers = std::max(1, jobs);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::ofstream out(csv_path, std::ios::app);
  if (!out) throw IoError("cannot open " + csv_path.string() + " for append");
  if (!have_file || std::filesystem::file_size(csv_path) == 0)
    out << sweep_csv_header() << "\n";
  for (const auto& rows : unit_rows) {
    for (const SweepRow& r : rows) out << sweep_row_to_csv(r) << "\n";
  }
  if (!out) throw IoError("write failure on " + csv_path.string());

  outcome.executed = executed.load();
  outcome.skipped = skipped.load();
  outcome.failures = failures.load();
  return outcome;
}

namespace {

// Group key: every row attribute except the varied dimension.
std::string group_key(const SweepRow& r, const std::string& vary) {
  const auto policy = PolicyConfig::parse(r.policy);
  std::ostringstream os;
  os << r.instance_id << '|' << r.m << '|' << r.capacity;
  if (vary == "policy") return os.str();
  os << '|' << (vary == "ordering" ? "*" : to_string(policy->ordering));
  os << '|' << (vary == "removal" ? "*" : to_string(policy->removal));
  os << '|' << (vary == "wait" ? "*" : (policy->wait ? "wait" : "nowait"));
  os << '|' << (vary == "dependency" ? "*" : to_string(policy->dep));
  return os.str();
}

std::string variant_of(const SweepRow& r, const std::string& vary) {
  if (vary == "policy") return r.policy;
  const auto policy = PolicyConfig::parse(r.policy);
  if (vary == "ordering") return to_string(policy->ordering);
  if (vary == "removal") return to_string(policy->removal);
  if (vary == "wait") return policy->wait ? "wait" : "nowait";
  return to_string(policy->dep);  // dependency
}

}  // namespace

std::string report_csv(const std::vector<SweepRow>& rows, const std::string& vary) {
  if (vary != "ordering" && vary != "removal" && vary != "wait" && vary != "dependency" &&
      vary != "policy")
    throw std::invalid_argument("vary must be ordering|removal|wait|dependency|policy");

  std::set<std::string> variants;
  std::map<std::string, std::map<std::string, double>> groups;  // key -> variant -> mean
  for (const SweepRow& r : rows) {
    if (vary != "policy" && r.policy == "OW") continue;  // OW carries no tuple fields
    variants.insert(variant_of(r, vary));
    groups[group_key(r, vary)][variant_of(r, vary)] = r.mean_latency;
  }
  if (groups.empty()) throw IncompleteGroup("no rows to report on");

  std::map<std::string, std::vector<double>> relative;  // variant -> relative values
  for (const auto& [key, by_variant] : groups) {
    if (by_variant.size() != variants.size())
      throw IncompleteGroup("group " + key + " has " + std::to_string(by_variant.size()) +
                            " of " + std::to_string(variants.size()) + " variants");
    double lo = by_variant.begin()->second;
    for (const auto& [v, mean] : by_variant) lo = std::min(lo, mean);
    for (const auto& [v, mean] : by_variant)
      relative[v].push_back(lo == 0.0 ? 1.0 : mean / lo);
  }

  std::ostringstream os;
  os << "group,q1,median,q3,whisker_lo,whisker_hi,n_outliers\n";
  for (const auto& [variant, values] : relative) {
    const BoxStats box = box_stats(values);
    os << '"' << variant << "\"," << format_double(box.q1) << ',' << format_double(box.median)
       << ',' << format_double(box.q3) << ',' << format_double(box.whisker_lo) << ','
       << format_double(box.whisker_hi) << ',' << box.outliers.size() << "\n";
  }
  return os.str();
}

}  // namespace faas
