#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "faas/engine.hpp"
#include "faas/io.hpp"
#include "faas/metrics.hpp"
#include "faas/sweep.hpp"
#include "faas/workload.hpp"

using namespace faas;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SweepSpec tiny_spec() {
  SweepSpec spec;
  spec.families = {2};
  spec.setups = {{0, 3}};
  spec.chains = {{1, 2}};
  spec.machines = {2};
  spec.capacities = {10};
  spec.instances_per_cell = 2;
  spec.tasks = 8;
  spec.policies = {"OW", "FIFO,LRU,nowait,def", "EF,LRU,wait,start"};
  spec.base_seed = 7;
  return spec;
}

const std::filesystem::path kDir =
    std::filesystem::temp_directory_path() / "faas_sweep_test";

}  // namespace

TEST_CASE("sweep spec JSON parsing") {
  const std::string text = R"({
    "families": [10, 50],
    "setups": [[0, 0], [10, 20]],
    "chains": [[2, 10]],
    "machines": [2, 5],
    "capacities": [10],
    "instances_per_cell": 3,
    "tasks": 100,
    "policies": ["OW", "EF,LRU,wait,start"],
    "base_seed": 9
  })";
  const SweepSpec spec = parse_sweep_spec(text);
  CHECK(spec.families == std::vector<int>{10, 50});
  CHECK(spec.setups.size() == 2);
  CHECK(spec.setups[1] == std::pair<Time, Time>{10, 20});
  CHECK(spec.chains == std::vector<std::pair<int, int>>{{2, 10}});
  CHECK(spec.machines == std::vector<int>{2, 5});
  CHECK(spec.instances_per_cell == 3);
  CHECK(spec.tasks == 100);
  CHECK_FALSE(spec.dag);
  CHECK(spec.base_seed == 9);
  // 2 * 2 * 1 cells * 3 instances * 2 clusters * 1 capacity * 2 policies
  CHECK(spec.total_runs() == 2 * 2 * 1 * 3 * 2 * 1 * 2);

  CHECK_THROWS_AS(parse_sweep_spec("{oops"), ParseError);
  CHECK_THROWS_AS(parse_sweep_spec("{}"), ParseError);
  CHECK_THROWS_AS(parse_sweep_spec(R"({"families":[1],"setups":[[0,0]],"chains":[[1,2]],
    "machines":[1],"capacities":[5],"policies":["bogus"]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_sweep_spec(R"({"families":[],"setups":[[0,0]],"chains":[[1,2]],
    "machines":[1],"capacities":[5],"policies":["OW"]})"),
                  ParseError);
}

TEST_CASE("presets") {
  const auto paper = preset_spec("paper-grid");
  REQUIRE(paper.has_value());
  CHECK(paper->families.size() == 6);
  CHECK(paper->setups.size() == 4);
  CHECK(paper->chains.size() == 3);
  CHECK(paper->machines.size() * paper->capacities.size() == 15);
  CHECK(paper->instances_per_cell == 20);
  CHECK(paper->policies.size() == 91);  // OW + 90 tuples
  // 1440 instances on 15 clusters per policy.
  CHECK(paper->total_runs() == 1440u * 15u * 91u);

  const auto desk = preset_spec("desk");
  REQUIRE(desk.has_value());
  CHECK(desk->instances_per_cell == 5);
  CHECK_FALSE(preset_spec("nope").has_value());
}

TEST_CASE("seed derivation is stable and coordinate-sensitive") {
  const SweepSpec spec = tiny_spec();
  const std::uint64_t a = instance_seed(spec, 2, 0, 3, 1, 2, 0);
  CHECK(a == instance_seed(spec, 2, 0, 3, 1, 2, 0));
  CHECK(a != instance_seed(spec, 2, 0, 3, 1, 2, 1));
  CHECK(a != instance_seed(spec, 3, 0, 3, 1, 2, 0));
  SweepSpec other = spec;
  other.base_seed = 8;
  CHECK(a != instance_seed(other, 2, 0, 3, 1, 2, 0));

  const std::uint64_t s = simulation_seed(a, 2, 10, "OW");
  CHECK(s == simulation_seed(a, 2, 10, "OW"));
  CHECK(s != simulation_seed(a, 2, 10, "EF,LRU,wait,start"));
  CHECK(s != simulation_seed(a, 5, 10, "OW"));
}

TEST_CASE("CSV row round-trip with quoted policy field") {
  std::filesystem::create_directories(kDir);
  SweepRow row;
  row.instance_id = "chain_nf2_s0-3_l1-2_seed123";
  row.seed = 456;
  row.n_f = 2;
  row.s_min = 0;
  row.s_max = 3;
  row.l_min = 1;
  row.l_max = 2;
  row.m = 2;
  row.capacity = 10;
  row.policy = "EF,LRU,wait,start";
  row.mean_latency = 12.625;
  row.p95_latency = 31;
  const std::string line = sweep_row_to_csv(row);
  CHECK(line.find("\"EF,LRU,wait,start\"") != std::string::npos);

  const auto path = kDir / "roundtrip.csv";
  {
    std::ofstream out(path);
    out << sweep_csv_header() << "\n" << line << "\n";
  }
  const auto rows = read_sweep_csv(path);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].instance_id == row.instance_id);
  CHECK(rows[0].seed == row.seed);
  CHECK(rows[0].policy == row.policy);
  CHECK(rows[0].mean_latency == row.mean_latency);
  CHECK(rows[0].p95_latency == row.p95_latency);
  CHECK(rows[0].capacity == row.capacity);
}

TEST_CASE("format_double is shortest round-trip form") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(12.625) == "12.625");
  CHECK(std::stod(format_double(115.5)) == 115.5);
  const double awkward = 10.0 / 3.0;
  CHECK(std::stod(format_double(awkward)) == awkward);
}

TEST_CASE("run_sweep: cardinality, determinism across jobs, resume") {
  std::filesystem::create_directories(kDir);
  const SweepSpec spec = tiny_spec();
  const auto serial = kDir / "serial.csv";
  const auto parallel = kDir / "parallel.csv";
  std::filesystem::remove(serial);
  std::filesystem::remove(parallel);
  std::ostringstream sink;

  const SweepOutcome first = run_sweep(spec, serial, 1, sink);
  CHECK(first.planned == 6);
  CHECK(first.executed == 6);
  CHECK(first.skipped == 0);
  CHECK(first.failures == 0);
  CHECK(read_sweep_csv(serial).size() == 6);

  const SweepOutcome par = run_sweep(spec, parallel, 4, sink);
  CHECK(par.executed == 6);
  CHECK(slurp(parallel) == slurp(serial));  // byte-identical regardless of --jobs

  SUBCASE("rerun on a complete file skips everything") {
    const SweepOutcome again = run_sweep(spec, serial, 2, sink);
    CHECK(again.executed == 0);
    CHECK(again.skipped == 6);
    CHECK(slurp(serial) == slurp(parallel));
  }

  SUBCASE("resume re-executes only missing rows") {
    const std::string full = slurp(serial);
    // Drop the last two data lines.
    std::size_t cut = full.size();
    for (int i = 0; i < 2; ++i) cut = full.rfind('\n', cut - 2) + 1;
    {
      std::ofstream out(serial, std::ios::binary | std::ios::trunc);
      out << full.substr(0, cut);
    }
    const SweepOutcome resumed = run_sweep(spec, serial, 1, sink);
    CHECK(resumed.executed == 2);
    CHECK(resumed.skipped == 4);
    CHECK(slurp(serial) == full);
  }
}

TEST_CASE("sweep rows revalidate against direct simulation") {
  std::filesystem::create_directories(kDir);
  const SweepSpec spec = tiny_spec();
  const auto path = kDir / "revalidate.csv";
  std::filesystem::remove(path);
  std::ostringstream sink;
  run_sweep(spec, path, 2, sink);
  for (const SweepRow& r : read_sweep_csv(path)) {
    GenParams params;
    params.tasks = spec.tasks;
    params.families = r.n_f;
    params.setup_min = r.s_min;
    params.setup_max = r.s_max;
    params.chain_min = r.l_min;
    params.chain_max = r.l_max;
    // The generation seed is embedded in the instance id.
    const auto pos = r.instance_id.rfind("seed");
    params.seed = std::stoull(r.instance_id.substr(pos + 4));
    const Instance inst = generate_chain_instance(params);
    const SimResult sim =
        simulate(inst, {r.m, r.capacity}, *PolicyConfig::parse(r.policy), r.seed);
    CHECK(mean_latency(sim) == r.mean_latency);
    CHECK(percentile_latency(sim, 95.0) == r.p95_latency);
  }
}

TEST_CASE("report_csv cardinalities and normalization bounds") {
  // Synthetic complete grid: one instance/cluster, all 90 tuple policies + OW.
  std::vector<SweepRow> rows;
  double mean = 100.0;
  for (const PolicyConfig& p : all_tuple_policies()) {
    SweepRow r;
    r.instance_id = "chain_x";
    r.m = 2;
    r.capacity = 10;
    r.policy = p.str();
    r.mean_latency = mean;
    mean += 1.0;
    rows.push_back(r);
  }
  SweepRow ow;
  ow.instance_id = "chain_x";
  ow.m = 2;
  ow.capacity = 10;
  ow.policy = "OW";
  ow.mean_latency = 500.0;
  rows.push_back(ow);

  auto count_lines = [](const std::string& text) {
    std::size_t n = 0;
    for (char c : text) n += (c == '\n');
    return n;
  };

  const std::string by_ordering = report_csv(rows, "ordering");
  CHECK(count_lines(by_ordering) == 1 + 5);  // header + FIFO,EF,SJF,SW,RT
  const std::string by_removal = report_csv(rows, "removal");
  CHECK(count_lines(by_removal) == 1 + 3);
  const std::string by_wait = report_csv(rows, "wait");
  CHECK(count_lines(by_wait) == 1 + 2);
  const std::string by_dep = report_csv(rows, "dependency");
  CHECK(count_lines(by_dep) == 1 + 3);
  const std::string by_policy = report_csv(rows, "policy");
  CHECK(count_lines(by_policy) == 1 + 91);  // OW participates only here

  // All medians >= 1.0 by the normalization bound.
  std::istringstream in(by_ordering);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto q = line.rfind('"');
    std::istringstream fields(line.substr(q + 2));
    std::string cell;
    std::getline(fields, cell, ',');  // q1
    std::getline(fields, cell, ',');  // median
    CHECK(std::stod(cell) >= 1.0);
  }

  CHECK_THROWS_AS(report_csv(rows, "bogus"), std::invalid_argument);
  rows.pop_back();  // drop OW
  rows.pop_back();  // now one tuple policy missing -> incomplete groups
  CHECK_THROWS_AS(report_csv(rows, "ordering"), IncompleteGroup);
  CHECK_THROWS_AS(report_csv(std::vector<SweepRow>{}, "ordering"), IncompleteGroup);
}

TEST_CASE("all-equal group normalizes to exactly 1.0") {
  std::vector<SweepRow> rows;
  for (const char* ps : {"FIFO,LRU,nowait,def", "FIFO,MinTime,nowait,def",
                         "FIFO,MinFamily,nowait,def"}) {
    SweepRow r;
    r.instance_id = "chain_y";
    r.m = 1;
    r.capacity = 10;
    r.policy = ps;
    r.mean_latency = 42.0;
    rows.push_back(r);
  }
  const std::string out = report_csv(rows, "removal");
  std::istringstream in(out);
  std::string line;
  std::getline(in, line);
  int data_lines = 0;
  while (std::getline(in, line)) {
    ++data_lines;
    CHECK(line.find(",1,1,1,1,1,0") != std::string::npos);
  }
  CHECK(data_lines == 3);
}
