#include "faas/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace faas {

const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::FIFO: return "FIFO";
    case Ordering::EF: return "EF";
    case Ordering::SJF: return "SJF";
    case Ordering::SW: return "SW";
    case Ordering::RT: return "RT";
  }
  return "?";
}

const char* to_string(Removal r) {
  switch (r) {
    case Removal::LRU: return "LRU";
    case Removal::MinTime: return "MinTime";
    case Removal::MinFamily: return "MinFamily";
  }
  return "?";
}

const char* to_string(DepMode d) {
  switch (d) {
    case DepMode::Def: return "def";
    case DepMode::Start: return "start";
    case DepMode::Stbr: return "stbr";
  }
  return "?";
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
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

std::optional<PolicyConfig> PolicyConfig::parse(const std::string& text) {
  if (lower(text) == "ow") return make_ow();
  auto parts = split(text, ',');
  if (parts.size() != 4) return std::nullopt;
  PolicyConfig p;
  const std::string o = lower(parts[0]);
  if (o == "fifo") p.ordering = Ordering::FIFO;
  else if (o == "ef") p.ordering = Ordering::EF;
  else if (o == "sjf") p.ordering = Ordering::SJF;
  else if (o == "sw") p.ordering = Ordering::SW;
  else if (o == "rt") p.ordering = Ordering::RT;
  else return std::nullopt;
  const std::string r = lower(parts[1]);
  if (r == "lru") p.removal = Removal::LRU;
  else if (r == "mintime") p.removal = Removal::MinTime;
  else if (r == "minfamily") p.removal = Removal::MinFamily;
  else return std::nullopt;
  const std::string w = lower(parts[2]);
  if (w == "wait") p.wait = true;
  else if (w == "nowait") p.wait = false;
  else return std::nullopt;
  const std::string d = lower(parts[3]);
  if (d == "def") p.dep = DepMode::Def;
  else if (d == "start") p.dep = DepMode::Start;
  else if (d == "stbr") p.dep = DepMode::Stbr;
  else return std::nullopt;
  return p;
}

std::string PolicyConfig::str() const {
  if (ow) return "OW";
  std::ostringstream os;
  os << to_string(ordering) << ',' << to_string(removal) << ','
     << (wait ? "wait" : "nowait") << ',' << to_string(dep);
  return os.str();
}

std::vector<PolicyConfig> all_tuple_policies() {
  std::vector<PolicyConfig> out;
  for (Ordering o : {Ordering::FIFO, Ordering::EF, Ordering::SJF, Ordering::SW, Ordering::RT})
    for (Removal r : {Removal::LRU, Removal::MinTime, Removal::MinFamily})
      for (bool w : {false, true})
        for (DepMode d : {DepMode::Def, DepMode::Start, DepMode::Stbr})
          out.push_back(PolicyConfig::tuple(o, r, w, d));
  return out;
}

std::vector<std::string> validate_instance(const Instance& instance) {
  std::vector<std::string> report;
  auto add = [&report](const std::string& msg) { report.push_back(msg); };

  std::set<int> family_ids;
  for (std::size_t i = 0; i < instance.families.size(); ++i) {
    const FamilySpec& f = instance.families[i];
    if (f.id != static_cast<int>(i) + 1)
      add("family at position " + std::to_string(i) + " has non-dense id " + std::to_string(f.id));
    if (!family_ids.insert(f.id).second)
      add("duplicate family id " + std::to_string(f.id));
    if (f.duration < 1)
      add("family " + std::to_string(f.id) + " duration < 1");
    if (f.size < 1)
      add("family " + std::to_string(f.id) + " size < 1");
    if (f.setup < 0)
      add("family " + std::to_string(f.id) + " setup < 0");
  }

  std::set<int> task_ids;
  std::set<int> job_ids;
  for (const JobSpec& job : instance.jobs) {
    if (!job_ids.insert(job.id).second)
      add("duplicate job id " + std::to_string(job.id));
    std::map<int, int> index_of;  // task id -> index within this job
    for (std::size_t k = 0; k < job.tasks.size(); ++k) {
      const TaskSpec& t = job.tasks[k];
      if (!task_ids.insert(t.id).second)
        add("duplicate task id " + std::to_string(t.id));
      if (t.job != job.id)
        add("task " + std::to_string(t.id) + " names job " + std::to_string(t.job) +
            " but lives in job " + std::to_string(job.id));
      if (t.index != static_cast<int>(k) + 1)
        add("task " + std::to_string(t.id) + " index mismatch");
      if (family_ids.count(t.family) == 0)
        add("task " + std::to_string(t.id) + " references unknown family " +
            std::to_string(t.family));
      index_of[t.id] = t.index;
    }
    for (const TaskSpec& t : job.tasks) {
      for (int p : t.preds) {
        auto it = index_of.find(p);
        if (it == index_of.end()) {
          add("task " + std::to_string(t.id) + " has predecessor " + std::to_string(p) +
              " outside its job");
        } else if (it->second >= t.index) {
          add("task " + std::to_string(t.id) + " has forward precedence on task " +
              std::to_string(p));
        }
      }
    }
  }
  return report;
}

}  // namespace faas
