#include "asknav/eval.hpp"

#include <atomic>
#include <stdexcept>
#include <thread>

#include "asknav/policy.hpp"
#include "asknav/rng.hpp"

namespace asknav {

EvalResult evaluate_policy(const PolicyFactory& factory, const std::vector<Task>& tasks,
                           const std::map<std::string, SceneGraph>& scenes,
                           const EpisodeConfig& config, const std::vector<uint64_t>& seeds,
                           int workers) {
  if (tasks.empty()) throw std::invalid_argument("evaluate_policy: no tasks");
  if (seeds.empty()) throw std::invalid_argument("evaluate_policy: no seeds");

  EvalResult result;
  result.trajectories.assign(seeds.size(), std::vector<Trajectory>(tasks.size()));

  const size_t total = seeds.size() * tasks.size();
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    auto policy = factory();
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const size_t si = idx / tasks.size();
      const size_t ti = idx % tasks.size();
      const Task& task = tasks[ti];
      const SceneGraph& scene = scenes.at(task.scene_id);
      const uint64_t env_seed = derive_seed(seeds[si], ti, 0xE7A1ULL);
      const uint64_t pol_seed = derive_seed(seeds[si], ti, 0xF01DULL);
      EpisodeResult er = run_episode(*policy, scene, task, config, env_seed, pol_seed);
      result.trajectories[si][ti] = std::move(er.trajectory);
    }
  };
  const int n_workers = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers - 1; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  EvalResult final =
      reports_from_trajectories(result.trajectories, tasks, config.cost, seeds);
  final.trajectories = std::move(result.trajectories);
  return final;
}

EvalResult reports_from_trajectories(const std::vector<std::vector<Trajectory>>& per_seed_trajs,
                                     const std::vector<Task>& tasks, const CostParams& params,
                                     const std::vector<uint64_t>& seeds) {
  std::vector<std::string> tags;
  for (const auto& t : tasks) tags.push_back(to_string(t.difficulty));

  EvalResult out;
  for (size_t si = 0; si < per_seed_trajs.size(); ++si) {
    MetricsReport r = compute_metrics_with_difficulty(per_seed_trajs[si], params, tags);
    r.seed = si < seeds.size() ? seeds[si] : 0;
    out.per_seed.push_back(std::move(r));
  }
  out.aggregate = aggregate_seeds(out.per_seed);
  return out;
}

}  // namespace asknav
