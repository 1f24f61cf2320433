#include "asknav/trajlog.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace asknav {

using nlohmann::json;

json action_to_json(const Action& action) {
  json j;
  j["type"] = to_string(action.kind);
  switch (action.kind) {
    case ActionKind::Navigate:
      j["location_id"] = action.location_id;
      break;
    case ActionKind::Ask:
      j["query"] = action.ask_open ? "open" : action.ask_kind;
      break;
    case ActionKind::GetMemory:
      j["key"] = action.memory_key;
      break;
    case ActionKind::Found:
      j["object_id"] = action.object_id;
      break;
  }
  return j;
}

Action action_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "navigate") return make_navigate(j.at("location_id").get<std::string>());
  if (type == "ask") {
    const std::string query = j.at("query").get<std::string>();
    return query == "open" ? make_ask_open() : make_ask_kind(query);
  }
  if (type == "get_memory") return make_get_memory(j.at("key").get<std::string>());
  if (type == "found") return make_found(j.at("object_id").get<std::string>());
  throw std::invalid_argument("unknown action type: " + type);
}

namespace {

json step_to_json(const StepRecord& s) {
  return json{{"action", action_to_json(s.action)},
              {"cost", s.cost},
              {"log_prob", s.log_prob},
              {"obs", s.observation_summary}};
}

StepRecord step_from_json(const json& j) {
  StepRecord s;
  s.action = action_from_json(j.at("action"));
  s.cost = j.at("cost").get<double>();
  s.log_prob = j.at("log_prob").get<double>();
  s.observation_summary = j.at("obs").get<std::string>();
  return s;
}

json trajectory_to_json(const Trajectory& t) {
  json steps = json::array();
  for (const auto& s : t.steps) steps.push_back(step_to_json(s));
  return json{{"record_version", 1},
              {"task_id", t.task_id},
              {"seed", t.seed},
              {"outcome", to_string(t.outcome)},
              {"total_cost", t.total_cost},
              {"return", t.return_value},
              {"steps", steps}};
}

Trajectory trajectory_from_json(const json& j) {
  if (j.at("record_version").get<int>() != 1) {
    throw std::invalid_argument("unsupported trajectory record version");
  }
  Trajectory t;
  t.task_id = j.at("task_id").get<std::string>();
  t.seed = j.at("seed").get<uint64_t>();
  t.outcome = outcome_from_string(j.at("outcome").get<std::string>());
  t.total_cost = j.at("total_cost").get<double>();
  t.return_value = j.at("return").get<double>();
  for (const auto& sj : j.at("steps")) t.steps.push_back(step_from_json(sj));
  return t;
}

}  // namespace

std::string trajectory_to_jsonl(const Trajectory& traj) {
  return trajectory_to_json(traj).dump();
}

Trajectory trajectory_from_jsonl(const std::string& line) {
  return trajectory_from_json(json::parse(line));
}

void append_trajectories(const std::string& path, const std::vector<Trajectory>& trajs) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& t : trajs) out << trajectory_to_jsonl(t) << "\n";
}

std::vector<Trajectory> load_trajectories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Trajectory> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(trajectory_from_jsonl(line));
  }
  return out;
}

std::string expert_trace_to_jsonl(const ExpertTrace& trace) {
  json j = trajectory_to_json(trace.trajectory);
  j["root_value"] = trace.root_value;
  json expert = json::array();
  for (const auto& s : trace.steps) {
    expert.push_back(json{{"belief", s.belief_summary},
                          {"action", action_to_json(s.action)},
                          {"expected_remaining_cost", s.expected_remaining_cost}});
  }
  j["expert_steps"] = expert;
  json decisions = json::array();
  for (const auto& d : trace.decisions) {
    json mask = json::array();
    for (bool m : d.mask) mask.push_back(m ? 1 : 0);
    decisions.push_back(json{{"features", d.features},
                             {"mask", mask},
                             {"template", d.template_index},
                             {"log_prob", d.log_prob}});
  }
  j["decisions"] = decisions;
  return j.dump();
}

ExpertTrace expert_trace_from_jsonl(const std::string& line) {
  json j = json::parse(line);
  ExpertTrace trace;
  trace.trajectory = trajectory_from_json(j);
  trace.task_id = trace.trajectory.task_id;
  trace.root_value = j.at("root_value").get<double>();
  for (const auto& sj : j.at("expert_steps")) {
    ExpertStep s;
    s.belief_summary = sj.at("belief").get<std::string>();
    s.action = action_from_json(sj.at("action"));
    s.expected_remaining_cost = sj.at("expected_remaining_cost").get<double>();
    trace.steps.push_back(std::move(s));
  }
  for (const auto& dj : j.at("decisions")) {
    DecisionRecord d;
    d.features = dj.at("features").get<std::vector<double>>();
    for (const auto& m : dj.at("mask")) d.mask.push_back(m.get<int>() != 0);
    d.template_index = dj.at("template").get<int>();
    d.log_prob = dj.at("log_prob").get<double>();
    trace.decisions.push_back(std::move(d));
  }
  return trace;
}

void save_corpus(const std::string& path, const std::vector<ExpertTrace>& traces) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& t : traces) out << expert_trace_to_jsonl(t) << "\n";
}

std::vector<ExpertTrace> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + " (run `asknav expert` first)");
  std::vector<ExpertTrace> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(expert_trace_from_jsonl(line));
  }
  return out;
}

}  // namespace asknav
