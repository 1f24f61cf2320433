#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asknav/action.hpp"

namespace asknav {

struct CostParams {
  double c_nav = 1.0;       // per meter
  double c_ask_base = 0.5;  // first question
  double c_mem = 0.01;
  double alpha = 0.2;       // ask fatigue growth
  double lambda = 1.0;      // cost-sensitivity weight
  double r_success = 1.0;
  double r_fail = -0.1;
  double c_format = 0.1;    // malformed-action penalty
  double c_ref = 2.0;       // SwC normalization constant

  void validate() const;  // throws std::invalid_argument

  bool operator==(const CostParams&) const = default;
};

enum class Outcome { Success, Failure, Timeout };

std::string to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

struct StepRecord {
  Action action;
  double cost = 0.0;
  std::string observation_summary;
  double log_prob = 0.0;  // under the acting policy; <= 0
};

struct Trajectory {
  std::string task_id;
  uint64_t seed = 0;
  std::vector<StepRecord> steps;
  Outcome outcome = Outcome::Failure;
  double total_cost = 0.0;
  double return_value = 0.0;
};

// Eq-style heterogeneous action pricing. nav_distance must be supplied for
// Navigate and omitted otherwise; n_prior_asks counts questions asked before
// this one, so the first ask costs exactly c_ask_base.
double action_cost(ActionKind kind, int n_prior_asks, std::optional<double> nav_distance,
                   const CostParams& params);
double action_cost(const Action& action, int n_prior_asks, std::optional<double> nav_distance,
                   const CostParams& params);

// Sparse terminal reward minus lambda-weighted cost sum. The trajectory must
// be complete (terminal outcome set); format penalties are part of the cost
// sum, so they are scaled by lambda like every other cost.
double trajectory_return(const Trajectory& traj, const CostParams& params);

struct MetricsReport {
  uint64_t seed = 0;  // producing seed; 0 for aggregates
  double sr = 0.0;
  std::optional<double> ttc;  // absent when no successes
  double swc = 0.0;
  double traj_len_mean = 0.0;
  std::map<std::string, int> action_histogram;  // keys: navigate/ask/get_memory/found
  // per-seed rows; empty unless this report aggregates several seeds
  struct SeedRow {
    uint64_t seed = 0;
    double sr = 0.0;
    std::optional<double> ttc;
    double swc = 0.0;
    double traj_len_mean = 0.0;
  };
  std::vector<SeedRow> per_seed;
  // mean/std summaries filled by aggregate_seeds
  std::map<std::string, double> mean_std;
  // per-difficulty breakdown (bins by candidate count; distractors = candidates - 1)
  struct DifficultyRow {
    int n_tasks = 0;
    double sr = 0.0;
    std::optional<double> ttc;
  };
  std::map<std::string, DifficultyRow> per_difficulty;
  int n_episodes = 0;
};

// SR / TTC / SwC over a batch of finished episodes.
// SwC = SR * c_ref / max(TTC, c_ref); 0 when no successes.
MetricsReport compute_metrics(const std::vector<Trajectory>& episodes, const CostParams& params);

// Same but with a per-difficulty breakdown, given each episode's difficulty
// tag (parallel to `episodes`).
MetricsReport compute_metrics_with_difficulty(const std::vector<Trajectory>& episodes,
                                              const CostParams& params,
                                              const std::vector<std::string>& difficulty_tags);

// Seed-level mean and sample standard deviation; SwC aggregated as the mean
// of per-seed SwC values.
MetricsReport aggregate_seeds(const std::vector<MetricsReport>& reports);

std::string metrics_to_text(const MetricsReport& report, const std::string& title);
std::string metrics_to_json_text(const MetricsReport& report);
MetricsReport metrics_from_json_text(const std::string& text);

}  // namespace asknav
