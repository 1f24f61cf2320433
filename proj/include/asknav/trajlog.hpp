#pragma once

#include <string>
#include <vector>

#include "asknav/costs.hpp"
#include "asknav/planner.hpp"

#include "json.hpp"

namespace asknav {

// Action wire/log codec shared by trajectory logs and the external-policy
// protocol.
nlohmann::json action_to_json(const Action& action);
Action action_from_json(const nlohmann::json& j);

// Line-delimited trajectory records (record_version 1).
std::string trajectory_to_jsonl(const Trajectory& traj);
Trajectory trajectory_from_jsonl(const std::string& line);

void append_trajectories(const std::string& path, const std::vector<Trajectory>& trajs);
std::vector<Trajectory> load_trajectories(const std::string& path);

// Expert corpus: trajectory records enriched with per-step expert metadata
// and the training-ready decision tensors.
std::string expert_trace_to_jsonl(const ExpertTrace& trace);
ExpertTrace expert_trace_from_jsonl(const std::string& line);

void save_corpus(const std::string& path, const std::vector<ExpertTrace>& traces);
std::vector<ExpertTrace> load_corpus(const std::string& path);

}  // namespace asknav
