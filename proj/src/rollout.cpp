#include <chrono>
#include <sstream>

#include "asknav/env.hpp"
#include "asknav/policy.hpp"

namespace asknav {

namespace {

std::string summarize(const StepResult& res) {
  std::ostringstream ss;
  ss << "loc=" << res.observation.location_id
     << " remaining=" << res.observation.belief.n_remaining;
  if (res.malformed) ss << " malformed";
  return ss.str();
}

}  // namespace

EpisodeResult run_episode(Policy& policy, const SceneGraph& scene, const Task& task,
                          const EpisodeConfig& config, uint64_t env_seed, uint64_t policy_seed) {
  Episode ep(scene, task, config, env_seed);
  Rng policy_rng(policy_seed);
  policy.begin_episode();

  EpisodeResult result;
  result.trajectory.task_id = task.task_id;
  result.trajectory.seed = env_seed;

  while (!ep.done()) {
    const auto mask = ep.valid_mask();
    const DecisionContext ctx{ep.observation(), mask};

    const auto t0 = std::chrono::steady_clock::now();
    ActionChoice choice = policy.decide(ctx, policy_rng);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed > config.decision_timeout_s) {
      choice.action = make_found("");  // unresolvable: handled as malformed
      choice.template_index = -1;
    }

    DecisionRecord rec;
    rec.features = featurize(ctx.observation.belief);
    rec.mask = mask;
    rec.template_index = choice.template_index;
    rec.log_prob = choice.log_prob;

    const StepResult sr = ep.step(choice.action);

    StepRecord step;
    step.action = choice.action;
    step.cost = sr.cost;
    step.log_prob = choice.log_prob;
    step.observation_summary = summarize(sr);
    result.trajectory.steps.push_back(std::move(step));
    result.decisions.push_back(std::move(rec));
  }

  result.trajectory.outcome = ep.outcome();
  double total = 0.0;
  for (const auto& s : result.trajectory.steps) total += s.cost;
  result.trajectory.total_cost = total;
  result.trajectory.return_value = trajectory_return(result.trajectory, config.cost);
  return result;
}

}  // namespace asknav
