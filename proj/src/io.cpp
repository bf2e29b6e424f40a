#include "faas/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace faas {

namespace {

using json = nlohmann::ordered_json;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path.string());
  return buf.str();
}

void spill(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failure on " + path.string());
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
}

template <typename T>
T field(const json& obj, const char* name, const char* context) {
  auto it = obj.find(name);
  if (it == obj.end())
    throw ParseError(std::string(context) + ": missing field \"" + name + "\"");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(context) + ": field \"" + name + "\": " + e.what());
  }
}

}  // namespace

std::string instance_to_json(const Instance& instance) {
  json root;
  json meta = json::object();
  for (const auto& [k, v] : instance.meta.fields) meta[k] = v;
  root["meta"] = meta;
  root["families"] = json::array();
  for (const FamilySpec& f : instance.families) {
    root["families"].push_back(
        {{"id", f.id}, {"duration", f.duration}, {"size", f.size}, {"setup", f.setup}});
  }
  root["jobs"] = json::array();
  for (const JobSpec& job : instance.jobs) {
    json tasks = json::array();
    for (const TaskSpec& t : job.tasks) {
      tasks.push_back({{"id", t.id}, {"family", t.family}, {"preds", t.preds}});
    }
    root["jobs"].push_back({{"id", job.id}, {"tasks", tasks}});
  }
  return root.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
  const json root = parse(text);
  Instance instance;
  if (root.contains("meta") && root["meta"].is_object()) {
    for (const auto& [k, v] : root["meta"].items()) {
      instance.meta.fields[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  for (const json& f : field<json>(root, "families", "instance")) {
    FamilySpec spec;
    spec.id = field<int>(f, "id", "family");
    spec.duration = field<Time>(f, "duration", "family");
    spec.size = field<Res>(f, "size", "family");
    spec.setup = field<Time>(f, "setup", "family");
    instance.families.push_back(spec);
  }
  for (const json& j : field<json>(root, "jobs", "instance")) {
    JobSpec job;
    job.id = field<int>(j, "id", "job");
    int index = 1;
    for (const json& t : field<json>(j, "tasks", "job")) {
      TaskSpec task;
      task.id = field<int>(t, "id", "task");
      task.family = field<int>(t, "family", "task");
      task.preds = field<std::vector<int>>(t, "preds", "task");
      task.job = job.id;
      task.index = index++;
      job.tasks.push_back(task);
    }
    instance.jobs.push_back(std::move(job));
  }
  auto report = validate_instance(instance);
  if (!report.empty()) throw ValidationError(report.front());
  return instance;
}

void write_instance(const Instance& instance, const std::filesystem::path& path) {
  spill(instance_to_json(instance), path);
}

Instance read_instance(const std::filesystem::path& path) {
  return instance_from_json(slurp(path));
}

std::string result_to_json(const SimResult& result) {
  json root;
  root["policy"] = result.policy;
  root["instance_id"] = result.instance_id;
  root["machines"] = result.machines;
  root["capacity"] = result.capacity;
  root["seed"] = result.seed;
  root["tasks"] = json::array();
  for (const TaskRecord& t : result.tasks) {
    root["tasks"].push_back({{"task", t.task},
                             {"job", t.job},
                             {"family", t.family},
                             {"machine", t.machine},
                             {"env", t.env},
                             {"release", t.release},
                             {"start", t.start},
                             {"end", t.end}});
  }
  root["envs"] = json::array();
  for (const EnvRecord& e : result.envs) {
    json rec = {{"env", e.env},
                {"family", e.family},
                {"machine", e.machine},
                {"created", e.created},
                {"init_done", e.init_done}};
    rec["removed"] = e.removed ? json(*e.removed) : json(nullptr);
    root["envs"].push_back(rec);
  }
  json latencies = json::object();
  for (const auto& [job, c] : result.job_latencies) latencies[std::to_string(job)] = c;
  root["job_latencies"] = latencies;
  return root.dump(2) + "\n";
}

SimResult result_from_json(const std::string& text) {
  const json root = parse(text);
  SimResult result;
  result.policy = field<std::string>(root, "policy", "result");
  result.instance_id = root.value("instance_id", "");
  result.machines = field<int>(root, "machines", "result");
  result.capacity = field<Res>(root, "capacity", "result");
  result.seed = root.value("seed", std::uint64_t{0});
  for (const json& t : field<json>(root, "tasks", "result")) {
    TaskRecord rec;
    rec.task = field<int>(t, "task", "task record");
    rec.job = field<int>(t, "job", "task record");
    rec.family = field<int>(t, "family", "task record");
    rec.machine = field<int>(t, "machine", "task record");
    rec.env = field<int>(t, "env", "task record");
    rec.release = field<Time>(t, "release", "task record");
    rec.start = field<Time>(t, "start", "task record");
    rec.end = field<Time>(t, "end", "task record");
    result.tasks.push_back(rec);
  }
  for (const json& e : field<json>(root, "envs", "result")) {
    EnvRecord rec;
    rec.env = field<int>(e, "env", "env record");
    rec.family = field<int>(e, "family", "env record");
    rec.machine = field<int>(e, "machine", "env record");
    rec.created = field<Time>(e, "created", "env record");
    rec.init_done = field<Time>(e, "init_done", "env record");
    if (e.contains("removed") && !e["removed"].is_null()) rec.removed = e["removed"].get<Time>();
    result.envs.push_back(rec);
  }
  const json latencies = field<json>(root, "job_latencies", "result");
  for (const auto& [job, c] : latencies.items()) {
    result.job_latencies[std::stoi(job)] = c.get<Time>();
  }
  return result;
}

void write_result(const SimResult& result, const std::filesystem::path& path) {
  spill(result_to_json(result), path);
}

SimResult read_result(const std::filesystem::path& path) {
  return result_from_json(slurp(path));
}

}  // namespace faas
