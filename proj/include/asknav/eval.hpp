#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "asknav/benchgen.hpp"
#include "asknav/costs.hpp"
#include "asknav/env.hpp"

namespace asknav {

// Fresh policy per worker thread (policies may be stateful).
using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

struct EvalResult {
  std::vector<MetricsReport> per_seed;              // one per seed
  MetricsReport aggregate;                          // seed-level mean/std
  std::vector<std::vector<Trajectory>> trajectories;  // [seed][task]
};

// Runs every task under every seed. Deterministic for fixed seeds regardless
// of worker count.
EvalResult evaluate_policy(const PolicyFactory& factory, const std::vector<Task>& tasks,
                           const std::map<std::string, SceneGraph>& scenes,
                           const EpisodeConfig& config, const std::vector<uint64_t>& seeds,
                           int workers);

// Recomputes the per-seed and aggregate reports from logged trajectories;
// reports are views over the logs, never independent state.
EvalResult reports_from_trajectories(const std::vector<std::vector<Trajectory>>& per_seed_trajs,
                                     const std::vector<Task>& tasks,
                                     const CostParams& params,
                                     const std::vector<uint64_t>& seeds);

}  // namespace asknav
