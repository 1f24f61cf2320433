#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "asknav/env.hpp"
#include "asknav/policy.hpp"

namespace asknav {

struct PlannerConfig {
  CostParams cost;
  OracleConfig oracle;
  int horizon = 12;
  // Surcharge a plan pays for ending anywhere but success. Demonstrations
  // must succeed, so this sits well above the terminal-reward swing of the
  // episode return; at the horizon edge the planner still takes last-resort
  // declarations because any leftover surcharge is sunk.
  double fail_penalty = 12.0;
};

struct ExpertStep {
  std::string belief_summary;
  Action action;
  double expected_remaining_cost = 0.0;  // planner value at the decision node
};

struct ExpertTrace {
  std::string task_id;
  std::vector<ExpertStep> steps;
  Trajectory trajectory;
  std::vector<DecisionRecord> decisions;  // training-ready (features, mask, template)
  double root_value = 0.0;
};

// Exact belief-space expectimax over the template set. Decision nodes
// minimize expected lambda-weighted cost plus a failure surcharge of
// (r_success - r_fail); chance nodes average over oracle usefulness and the
// partition of still-possible targets induced by the disclosed attribute.
// Memory lookups resolve deterministically against the provided store.
// Ground truth enters only through the chance model, never as the target id.
class ExpertPlanner {
 public:
  ExpertPlanner(const SceneGraph& scene, const Task& task, PlannerConfig config,
                const MemoryStore& store);
  ExpertPlanner(const SceneGraph& scene, const Task& task, PlannerConfig config);

  struct Solution {
    double value = 0.0;
    int best_template = -1;
  };

  // Value and best action of an arbitrary reachable belief state.
  Solution solve_state(const std::vector<std::string>& remaining_ids,
                       const std::map<std::string, std::string>& constraints,
                       const std::string& location_id, int n_asks, bool memory_queried,
                       const std::vector<std::string>& visited, int steps_elapsed);

  double root_value();

  size_t memo_size() const { return memo_.size(); }

 private:
  struct State;
  double value_of(const State& s);
  double child_after_ask(const State& s, int kind_index, int value_index) const;

  void build_tables(const MemoryStore& store);

  const SceneGraph* scene_;
  const Task* task_;
  PlannerConfig config_;
  double fail_penalty_ = 1.1;

  // canonical candidate order (ids ascending)
  std::vector<std::string> cand_ids_;
  std::vector<int> cand_true_loc_;                  // location index
  std::vector<std::array<int, 3>> cand_attr_;      // value index per kind
  std::vector<std::vector<std::string>> kind_values_;  // distinct values per kind
  std::vector<bool> covered_;
  std::vector<int> recorded_loc_;                   // -1 when uncovered
  std::vector<std::string> loc_ids_;
  std::vector<std::vector<double>> dist_;
  int start_loc_ = 0;

  std::map<uint64_t, Solution> memo_;
};

// Demonstration policy: acts greedily on the planner's values. Records the
// expected remaining cost at every decision for trace metadata.
class ExpertPolicy : public Policy {
 public:
  ExpertPolicy(const SceneGraph& scene, const Task& task, PlannerConfig config);
  ActionChoice decide(const DecisionContext& ctx, Rng& rng) override;
  void begin_episode() override { values_.clear(); summaries_.clear(); }
  const std::vector<double>& step_values() const { return values_; }
  const std::vector<std::string>& step_summaries() const { return summaries_; }

 private:
  ExpertPlanner planner_;
  std::vector<double> values_;
  std::vector<std::string> summaries_;
};

// Full demonstration for one task: plans, realizes the plan through the
// episode engine, and returns the annotated trace. May end in failure when
// oracle draws are unlucky; corpus generation re-rolls such tasks.
ExpertTrace plan(const SceneGraph& scene, const Task& task, const PlannerConfig& config,
                 uint64_t realization_seed);

// Memo-free exhaustive recursion over the same template set; only usable on
// tiny instances (<= 3 candidates, horizon <= 6). Independent check of the
// planner's root value.
double brute_force_value(const SceneGraph& scene, const Task& task, const CostParams& cost,
                         const OracleConfig& oracle, const MemoryStore& store, int horizon,
                         double fail_penalty = 12.0);
double brute_force_value(const SceneGraph& scene, const Task& task, const CostParams& cost,
                         const OracleConfig& oracle, int horizon, double fail_penalty = 12.0);

struct CorpusResult {
  std::vector<ExpertTrace> traces;
  int dropped = 0;
};

// One successful realization per task, re-rolled up to 3 seeds before the
// task is dropped with a warning.
CorpusResult generate_sft_corpus(const std::vector<Task>& tasks,
                                 const std::map<std::string, SceneGraph>& scenes,
                                 const PlannerConfig& config, uint64_t master_seed, int workers);

}  // namespace asknav
