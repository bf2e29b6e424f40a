#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "faas/engine.hpp"
#include "faas/io.hpp"
#include "faas/metrics.hpp"
#include "faas/rng.hpp"
#include "faas/sweep.hpp"
#include "faas/workload.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitValidation = 5;

struct Range {
  faas::Time lo = 0;
  faas::Time hi = 0;
};

bool parse_range(const std::string& text, Range* out) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return false;
  try {
    out->lo = std::stoll(text.substr(0, colon));
    out->hi = std::stoll(text.substr(colon + 1));
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

int cmd_generate(int families, const std::string& setup, const std::string& chain, int tasks,
                 std::uint64_t seed, int count, bool dag, const std::string& out_dir) {
  Range s, l;
  if (!parse_range(setup, &s) || !parse_range(chain, &l)) {
    std::cerr << "generate: --setup and --chain must be MIN:MAX\n";
    return kExitUsage;
  }
  try {
    for (int i = 0; i < count; ++i) {
      faas::GenParams params;
      params.families = families;
      params.setup_min = s.lo;
      params.setup_max = s.hi;
      params.chain_min = static_cast<int>(l.lo);
      params.chain_max = static_cast<int>(l.hi);
      params.tasks = tasks;
      params.seed = seed + static_cast<std::uint64_t>(i);
      faas::Instance instance = faas::generate_chain_instance(params);
      if (dag)
        instance = faas::dagify_instance(instance, faas::derive_seed(params.seed, 0xda6));
      const std::string name = faas::sweep_instance_id(dag, families, s.lo, s.hi,
                                                       static_cast<int>(l.lo),
                                                       static_cast<int>(l.hi), params.seed) +
                               ".json";
      const std::filesystem::path path = std::filesystem::path(out_dir) / name;
      faas::write_instance(instance, path);
      std::cout << path.string() << ": n=" << instance.num_tasks()
                << " N=" << instance.num_jobs() << " n_f=" << instance.families.size()
                << "\n";
    }
  } catch (const faas::InvalidParams& e) {
    std::cerr << "generate: " << e.what() << "\n";
    return kExitUsage;
  } catch (const faas::IoError& e) {
    std::cerr << "generate: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

int cmd_dagify(const std::string& in, std::uint64_t seed, const std::string& out) {
  try {
    const faas::Instance chain = faas::read_instance(in);
    const faas::Instance dag = faas::dagify_instance(chain, seed);
    faas::write_instance(dag, out);
    std::cout << out << ": n=" << dag.num_tasks() << " N=" << dag.num_jobs() << "\n";
    return kExitOk;
  } catch (const faas::NotAChain& e) {
    std::cerr << "dagify: " << e.what() << "\n";
    return kExitValidation;
  } catch (const faas::ParseError& e) {
    std::cerr << "dagify: " << e.what() << "\n";
    return kExitIo;
  } catch (const faas::ValidationError& e) {
    std::cerr << "dagify: " << e.what() << "\n";
    return kExitValidation;
  } catch (const faas::IoError& e) {
    std::cerr << "dagify: " << e.what() << "\n";
    return kExitIo;
  }
}

int cmd_simulate(const std::string& in, const std::string& policy_str, int machines,
                 faas::Res capacity, std::uint64_t seed, const std::string& out,
                 bool validate) {
  const auto policy = faas::PolicyConfig::parse(policy_str);
  if (!policy) {
    std::cerr << "simulate: bad policy \"" << policy_str << "\"\n";
    return kExitUsage;
  }
  try {
    const faas::Instance instance = faas::read_instance(in);
    const faas::ClusterConfig cluster{machines, capacity};
    faas::SimResult result = faas::simulate(instance, cluster, *policy, seed);
    result.instance_id = std::filesystem::path(in).stem().string();
    if (!out.empty()) faas::write_result(result, out);
    std::cout << "mean=" << faas::format_double(faas::mean_latency(result))
              << " p95=" << faas::percentile_latency(result, 95.0) << "\n";
    if (validate) {
      const auto report = faas::validate_schedule(instance, cluster, result);
      if (!report.empty()) {
        for (const auto& v : report) std::cerr << "violation: " << v << "\n";
        return kExitValidation;
      }
    }
    return kExitOk;
  } catch (const faas::InfeasibleInstance& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const faas::ParseError& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return kExitIo;
  } catch (const faas::ValidationError& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return kExitValidation;
  } catch (const faas::IoError& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return kExitIo;
  }
}

int cmd_sweep(const std::string& spec_path, const std::string& preset, const std::string& out,
              int jobs) {
  try {
    faas::SweepSpec spec;
    if (!preset.empty()) {
      const auto named = faas::preset_spec(preset);
      if (!named) {
        std::cerr << "sweep: unknown preset \"" << preset << "\"\n";
        return kExitUsage;
      }
      spec = *named;
    } else if (!spec_path.empty()) {
      std::ifstream in(spec_path);
      if (!in) {
        std::cerr << "sweep: cannot open " << spec_path << "\n";
        return kExitIo;
      }
      std::ostringstream buf;
      buf << in.rdbuf();
      spec = faas::parse_sweep_spec(buf.str());
    } else {
      std::cerr << "sweep: need --spec or --preset\n";
      return kExitUsage;
    }
    const auto outcome = faas::run_sweep(spec, out, jobs, std::cerr);
    std::cout << "runs=" << outcome.planned << " executed=" << outcome.executed
              << " skipped=" << outcome.skipped << " failures=" << outcome.failures << "\n";
    return outcome.failures == 0 ? kExitOk : 1;
  } catch (const faas::ParseError& e) {
    std::cerr << "sweep: " << e.what() << "\n";
    return kExitUsage;
  } catch (const faas::IoError& e) {
    std::cerr << "sweep: " << e.what() << "\n";
    return kExitIo;
  }
}

int cmd_report(const std::string& in, const std::string& vary, const std::string& out) {
  try {
    const auto rows = faas::read_sweep_csv(in);
    const std::string csv = faas::report_csv(rows, vary);
    if (out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream file(out);
      if (!file) {
        std::cerr << "report: cannot open " << out << "\n";
        return kExitIo;
      }
      file << csv;
    }
    return kExitOk;
  } catch (const faas::IncompleteGroup& e) {
    std::cerr << "report: " << e.what() << "\n";
    return kExitUsage;
  } catch (const faas::ParseError& e) {
    std::cerr << "report: " << e.what() << "\n";
    return kExitIo;
  } catch (const faas::IoError& e) {
    std::cerr << "report: " << e.what() << "\n";
    return kExitIo;
  }
}

int cmd_validate(const std::string& in) {
  try {
    const faas::Instance instance = faas::read_instance(in);
    const auto report = faas::validate_instance(instance);
    if (!report.empty()) {
      for (const auto& v : report) std::cerr << "violation: " << v << "\n";
      return kExitValidation;
    }
    std::cout << "valid: n=" << instance.num_tasks() << " N=" << instance.num_jobs() << "\n";
    return kExitOk;
  } catch (const faas::ValidationError& e) {
    std::cerr << "validate: " << e.what() << "\n";
    return kExitValidation;
  } catch (const faas::ParseError& e) {
    std::cerr << "validate: " << e.what() << "\n";
    return kExitIo;
  } catch (const faas::IoError& e) {
    std::cerr << "validate: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FaaS cold-start scheduling simulator and experiment harness"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "generate synthetic chain instances");
  int families = 50, tasks = 1000, count = 1;
  std::string setup = "10:20", chain = "10:20", out_path, in_path;
  std::uint64_t seed = 1;
  bool dag = false;
  generate->add_option("--families", families);
  generate->add_option("--setup", setup, "setup range MIN:MAX");
  generate->add_option("--chain", chain, "chain length range MIN:MAX");
  generate->add_option("--tasks", tasks);
  generate->add_option("--seed", seed);
  generate->add_option("--count", count, "number of instances (seeds seed..seed+count-1)");
  generate->add_flag("--dag", dag, "rewire chains into random out-trees");
  generate->add_option("--out", out_path, "output directory")->default_val(".");

  // dagify
  auto* dagify = app.add_subcommand("dagify", "rewire a chain instance into an out-tree");
  std::string dagify_in, dagify_out;
  std::uint64_t dagify_seed = 1;
  dagify->add_option("--in", dagify_in)->required();
  dagify->add_option("--seed", dagify_seed);
  dagify->add_option("--out", dagify_out)->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run one simulation");
  std::string policy = "FIFO,LRU,nowait,def", sim_out;
  int machines = 1;
  faas::Res capacity = 10;
  std::uint64_t sim_seed = 1;
  bool validate_flag = false;
  simulate->add_option("--in", in_path)->required();
  simulate->add_option("--policy", policy,
                       "\"OW\" or \"<ordering>,<removal>,<wait|nowait>,<def|start|stbr>\"");
  simulate->add_option("--machines", machines);
  simulate->add_option("--capacity", capacity);
  simulate->add_option("--seed", sim_seed);
  simulate->add_option("--out", sim_out, "write the schedule as JSON");
  simulate->add_flag("--validate", validate_flag, "check the schedule and fail on violations");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run an experiment grid into a CSV");
  std::string spec_path, preset, sweep_out = "sweep.csv";
  int jobs = 1;
  sweep->add_option("--spec", spec_path, "sweep spec JSON");
  sweep->add_option("--preset", preset, "named preset: paper-grid, desk");
  sweep->add_option("--out", sweep_out, "aggregate CSV path");
  sweep->add_option("--jobs", jobs, "parallel workers");

  // report
  auto* report = app.add_subcommand("report", "normalize a sweep CSV and emit box stats");
  std::string report_in, vary = "ordering", report_out;
  report->add_option("--in", report_in)->required();
  report->add_option("--vary", vary)
      ->check(CLI::IsMember({"ordering", "removal", "wait", "dependency", "policy"}));
  report->add_option("--out", report_out, "output CSV (stdout if omitted)");

  // validate
  auto* validate = app.add_subcommand("validate", "structurally validate an instance file");
  std::string validate_in;
  validate->add_option("--in", validate_in)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (generate->parsed())
    return cmd_generate(families, setup, chain, tasks, seed, count, dag, out_path);
  if (dagify->parsed()) return cmd_dagify(dagify_in, dagify_seed, dagify_out);
  if (simulate->parsed())
    return cmd_simulate(in_path, policy, machines, capacity, sim_seed, sim_out, validate_flag);
  if (sweep->parsed()) return cmd_sweep(spec_path, preset, sweep_out, jobs);
  if (report->parsed()) return cmd_report(report_in, vary, report_out);
  if (validate->parsed()) return cmd_validate(validate_in);
  return kExitUsage;
}
