#include "asknav/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace asknav {

using nlohmann::json;

void GrpoConfig::validate() const {
  if (group_size < 2) throw std::invalid_argument("grpo: group_size must be >= 2");
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
    throw std::invalid_argument("grpo: clip_epsilon must lie in (0,1)");
  }
  if (kl_beta < 0.0) throw std::invalid_argument("grpo: kl_beta must be >= 0");
  if (!(advantage_epsilon > 0.0)) throw std::invalid_argument("grpo: advantage_epsilon must be > 0");
  if (tasks_per_batch < 1 || epochs < 1 || inner_steps < 1) {
    throw std::invalid_argument("grpo: epochs, inner_steps, tasks_per_batch must be >= 1");
  }
}

namespace {

struct FlatSample {
  const std::vector<double>* features;
  const std::vector<bool>* mask;
  int tpl;
};

double lr_at(const SftConfig& cfg, int step, int total_steps) {
  const double warm_steps = cfg.warmup_ratio * total_steps;
  if (warm_steps >= 1.0 && step < warm_steps) {
    return cfg.learning_rate * (static_cast<double>(step) + 1.0) / warm_steps;
  }
  const double t = total_steps <= 1
                       ? 1.0
                       : static_cast<double>(step - warm_steps) /
                             std::max(1.0, static_cast<double>(total_steps) - warm_steps);
  const double floor = cfg.final_lr_ratio;
  return cfg.learning_rate * (floor + (1.0 - floor) * 0.5 * (1.0 + std::cos(M_PI * std::min(1.0, t))));
}

}  // namespace

SftResult sft_fit(const std::vector<ExpertTrace>& corpus, const PolicyParams& init,
                  const SftConfig& config) {
  if (corpus.empty()) throw std::invalid_argument("sft_fit: empty corpus");
  init.validate();

  std::vector<FlatSample> samples;
  for (const auto& trace : corpus) {
    for (const auto& d : trace.decisions) {
      if (d.template_index >= 0) samples.push_back(FlatSample{&d.features, &d.mask, d.template_index});
    }
  }
  if (samples.empty()) throw std::invalid_argument("sft_fit: corpus has no decisions");

  PolicyParams params = init;
  params.version_tag = "sft";
  Rng rng(config.shuffle_seed);

  const int n = static_cast<int>(samples.size());
  const int batch = std::max(1, std::min(config.batch_size, n));
  const int steps_per_epoch = (n + batch - 1) / batch;
  const int total_steps = steps_per_epoch * config.epochs;

  SftResult result;
  std::vector<int> order(samples.size());
  std::iota(order.begin(), order.end(), 0);

  int step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (int b = 0; b < steps_per_epoch; ++b) {
      const int lo = b * batch;
      const int hi = std::min(n, lo + batch);
      std::vector<double> grad(params.weights.size(), 0.0);
      double loss = 0.0;
      for (int i = lo; i < hi; ++i) {
        const FlatSample& s = samples[order[i]];
        const auto g = grad_log_prob(params, *s.features, *s.mask, s.tpl);
        for (size_t j = 0; j < grad.size(); ++j) grad[j] += g[j];
        loss -= log_prob_of(params, *s.features, *s.mask, s.tpl);
      }
      const double inv = 1.0 / static_cast<double>(hi - lo);
      loss *= inv;
      if (!std::isfinite(loss)) {
        throw std::runtime_error("sft_fit: loss diverged at step " + std::to_string(step));
      }
      const double lr = lr_at(config, step, total_steps);
      for (size_t j = 0; j < grad.size(); ++j) params.weights[j] += lr * grad[j] * inv;
      result.loss_curve.push_back(loss);
      ++step;
    }
  }

  double final_loss = 0.0;
  for (const FlatSample& s : samples) final_loss -= log_prob_of(params, *s.features, *s.mask, s.tpl);
  result.final_loss = final_loss / static_cast<double>(n);
  result.params = std::move(params);
  return result;
}

std::vector<double> group_advantages(const std::vector<double>& rewards,
                                     double advantage_epsilon) {
  if (rewards.size() < 2) throw std::invalid_argument("group_advantages: need G >= 2");
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double std_pop = std::sqrt(var / n);
  std::vector<double> out;
  out.reserve(rewards.size());
  for (double r : rewards) out.push_back((r - mean) / (std_pop + advantage_epsilon));
  return out;
}

std::pair<PolicyParams, GrpoStats> grpo_update(const PolicyParams& params,
                                               const PolicyParams& ref_params,
                                               const std::vector<GroupSample>& groups,
                                               const GrpoConfig& config) {
  config.validate();
  params.validate();
  ref_params.validate();
  if (groups.empty()) throw std::invalid_argument("grpo_update: no groups");

  std::vector<double> grad(params.weights.size(), 0.0);
  GrpoStats stats;
  int n_states = 0;
  int n_clipped = 0;
  int n_surrogate_steps = 0;
  double return_sum = 0.0, len_sum = 0.0;
  int traj_count = 0;

  const double lo = 1.0 - config.clip_epsilon;
  const double hi = 1.0 + config.clip_epsilon;
  const double group_weight = 1.0 / static_cast<double>(groups.size());

  for (const auto& group : groups) {
    if (group.advantages.size() != group.trajectories.size()) {
      throw std::invalid_argument("grpo_update: advantages missing for group " + group.task_id);
    }
    const double member_weight = group_weight / static_cast<double>(group.trajectories.size());
    for (size_t i = 0; i < group.trajectories.size(); ++i) {
      const auto& traj = group.trajectories[i];
      const double advantage = group.advantages[i];
      return_sum += group.rewards[i];
      len_sum += static_cast<double>(traj.size());
      ++traj_count;
      if (traj.empty()) continue;
      const double step_weight = member_weight / static_cast<double>(traj.size());
      for (const auto& step : traj) {
        if (step.template_index < 0) continue;
        const auto probs = action_distribution(params, step.features, step.mask);
        const double logp = std::log(probs[step.template_index]);
        double log_ratio = logp - step.log_prob_old;
        if (log_ratio > config.log_ratio_clamp || log_ratio < -config.log_ratio_clamp) {
          log_ratio = std::clamp(log_ratio, -config.log_ratio_clamp, config.log_ratio_clamp);
          ++stats.ratio_clamps;
        }
        const double ratio = std::exp(log_ratio);
        const double unclipped = ratio * advantage;
        const double clipped = std::clamp(ratio, lo, hi) * advantage;
        ++n_surrogate_steps;
        if (unclipped <= clipped) {
          // the unclipped branch is active: gradient A * rho * grad log pi
          const auto g = grad_log_prob(params, step.features, step.mask, step.template_index);
          const double coef = step_weight * advantage * ratio;
          for (size_t j = 0; j < grad.size(); ++j) grad[j] += coef * g[j];
        } else {
          ++n_clipped;
        }
      }
    }
  }

  // exact KL to the reference and entropy bonus, averaged over visited states
  std::vector<double> kl_entropy_grad(params.weights.size(), 0.0);
  double kl_sum = 0.0, entropy_sum = 0.0;
  for (const auto& group : groups) {
    for (const auto& traj : group.trajectories) {
      for (const auto& step : traj) {
        if (step.template_index < 0) continue;
        ++n_states;
        const auto p = action_distribution(params, step.features, step.mask);
        const auto q = action_distribution(ref_params, step.features, step.mask);
        const double kl = kl_divergence(p, q);
        const double h = entropy_of(p);
        kl_sum += kl;
        entropy_sum += h;
        // d/d logit_u of KL = p_u ((log p_u - log q_u) - KL);
        // d/d logit_u of H  = -p_u (log p_u + H)
        for (int u = 0; u < params.n_templates; ++u) {
          if (!step.mask[u] || p[u] <= 0.0) continue;
          const double dkl = p[u] * ((std::log(p[u]) - std::log(q[u])) - kl);
          const double dh = -p[u] * (std::log(p[u]) + h);
          const double coef = (-config.kl_beta * dkl + config.entropy_coef * dh) / params.temperature;
          for (int j = 0; j < params.n_features; ++j) {
            kl_entropy_grad[u * params.n_features + j] += coef * step.features[j];
          }
        }
      }
    }
  }
  if (n_states > 0) {
    const double inv = 1.0 / static_cast<double>(n_states);
    for (size_t j = 0; j < grad.size(); ++j) grad[j] += kl_entropy_grad[j] * inv;
    stats.mean_kl = kl_sum * inv;
    stats.mean_entropy = entropy_sum * inv;
  }

  PolicyParams out = params;
  for (size_t j = 0; j < grad.size(); ++j) {
    if (!std::isfinite(grad[j])) throw std::runtime_error("grpo_update: non-finite gradient");
    out.weights[j] += config.learning_rate * grad[j];
  }
  stats.mean_return = traj_count > 0 ? return_sum / traj_count : 0.0;
  stats.mean_traj_len = traj_count > 0 ? len_sum / traj_count : 0.0;
  stats.clip_fraction =
      n_surrogate_steps > 0 ? static_cast<double>(n_clipped) / n_surrogate_steps : 0.0;
  return {std::move(out), stats};
}

namespace {

struct RolloutSlot {
  std::vector<TrainStep> steps;
  double reward = 0.0;
  double length = 0.0;
  int n_mem = 0, n_nav = 0, n_total = 0;
};

}  // namespace

TrainResult train_hc_grpo(const std::vector<Task>& tasks,
                          const std::map<std::string, SceneGraph>& scenes,
                          const PolicyParams& sft_params, const EpisodeConfig& env_config,
                          const GrpoConfig& config, uint64_t master_seed, int workers,
                          const IterationCallback& callback) {
  config.validate();
  if (tasks.empty()) throw std::invalid_argument("train_hc_grpo: no tasks");

  PolicyParams params = sft_params;
  params.version_tag = "rl";
  const PolicyParams ref = sft_params;  // frozen anchor

  TrainResult result;
  Rng order_rng(derive_seed(master_seed, 0x5EED));
  std::vector<int> order(tasks.size());
  std::iota(order.begin(), order.end(), 0);

  int iteration = 0;
  double last_kl = 0.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng.engine());
    for (size_t pos = 0; pos < order.size(); pos += config.tasks_per_batch) {
      const size_t end = std::min(order.size(), pos + config.tasks_per_batch);
      const int n_tasks = static_cast<int>(end - pos);
      const int total = n_tasks * config.group_size;
      std::vector<RolloutSlot> slots(total);

      // parallel, deterministic collection: every rollout has its own streams
      std::atomic<int> next{0};
      const PolicyParams snapshot = params;
      auto worker = [&]() {
        for (;;) {
          const int idx = next.fetch_add(1);
          if (idx >= total) return;
          const int t = idx / config.group_size;
          const int g = idx % config.group_size;
          const Task& task = tasks[order[pos + t]];
          const SceneGraph& scene = scenes.at(task.scene_id);
          SoftmaxPolicy policy(snapshot);
          const uint64_t rollout_key =
              (static_cast<uint64_t>(epoch) << 32) | static_cast<uint64_t>(pos + t);
          const uint64_t env_seed = derive_seed(master_seed, rollout_key, g, 0xE17ULL);
          const uint64_t pol_seed = derive_seed(master_seed, rollout_key, g, 0xAC7ULL);
          EpisodeResult er = run_episode(policy, scene, task, env_config, env_seed, pol_seed);
          RolloutSlot& slot = slots[idx];
          slot.reward = er.trajectory.return_value;
          slot.length = static_cast<double>(er.trajectory.steps.size());
          for (size_t s = 0; s < er.decisions.size(); ++s) {
            const auto& d = er.decisions[s];
            slot.steps.push_back(TrainStep{d.features, d.mask, d.template_index, d.log_prob});
            ++slot.n_total;
            const ActionKind kind = er.trajectory.steps[s].action.kind;
            if (kind == ActionKind::GetMemory) ++slot.n_mem;
            if (kind == ActionKind::Navigate) ++slot.n_nav;
          }
        }
      };
      const int n_workers = std::max(1, workers);
      std::vector<std::thread> pool;
      for (int w = 0; w < n_workers - 1; ++w) pool.emplace_back(worker);
      worker();
      for (auto& th : pool) th.join();

      std::vector<GroupSample> groups(n_tasks);
      double ret_sum = 0.0, len_sum = 0.0;
      int mem_actions = 0, nav_actions = 0, all_actions = 0;
      for (int t = 0; t < n_tasks; ++t) {
        GroupSample& gs = groups[t];
        gs.task_id = tasks[order[pos + t]].task_id;
        for (int g = 0; g < config.group_size; ++g) {
          RolloutSlot& slot = slots[t * config.group_size + g];
          gs.trajectories.push_back(std::move(slot.steps));
          gs.rewards.push_back(slot.reward);
          ret_sum += slot.reward;
          len_sum += slot.length;
          mem_actions += slot.n_mem;
          nav_actions += slot.n_nav;
          all_actions += slot.n_total;
        }
        gs.advantages = group_advantages(gs.rewards, config.advantage_epsilon);
      }

      GrpoStats stats;
      for (int step = 0; step < config.inner_steps; ++step) {
        auto [updated, s] = grpo_update(params, ref, groups, config);
        params = std::move(updated);
        stats = s;
      }
      last_kl = stats.mean_kl;

      CurvePoint point;
      point.iteration = iteration;
      point.mean_return = ret_sum / total;
      point.mean_traj_len = len_sum / total;
      point.mean_kl = stats.mean_kl;
      point.clip_fraction = stats.clip_fraction;
      point.get_memory_share = all_actions > 0 ? static_cast<double>(mem_actions) / all_actions : 0.0;
      point.navigate_share = all_actions > 0 ? static_cast<double>(nav_actions) / all_actions : 0.0;
      result.curve.push_back(point);
      if (callback) callback(point);
      ++iteration;
    }
  }

  result.params = std::move(params);
  result.final_mean_kl = last_kl;
  return result;
}

std::string curve_to_table(const std::vector<CurvePoint>& curve) {
  std::ostringstream ss;
  ss << "# iteration  mean_return\n";
  for (const auto& p : curve) {
    ss << std::setw(11) << p.iteration << "  " << std::fixed << std::setprecision(6)
       << p.mean_return << "\n";
  }
  ss << "\n# iteration  mean_traj_len\n";
  for (const auto& p : curve) {
    ss << std::setw(11) << p.iteration << "  " << std::fixed << std::setprecision(6)
       << p.mean_traj_len << "\n";
  }
  return ss.str();
}

std::string curve_to_json_text(const std::vector<CurvePoint>& curve) {
  json arr = json::array();
  for (const auto& p : curve) {
    arr.push_back(json{{"iteration", p.iteration},
                       {"mean_return", p.mean_return},
                       {"mean_traj_len", p.mean_traj_len},
                       {"mean_kl", p.mean_kl},
                       {"clip_fraction", p.clip_fraction},
                       {"get_memory_share", p.get_memory_share},
                       {"navigate_share", p.navigate_share}});
  }
  return json{{"format_version", 1}, {"curve", arr}}.dump(2) + "\n";
}

std::vector<CurvePoint> curve_from_json_text(const std::string& text) {
  json j = json::parse(text);
  std::vector<CurvePoint> out;
  for (const auto& pj : j.at("curve")) {
    CurvePoint p;
    p.iteration = pj.at("iteration").get<int>();
    p.mean_return = pj.at("mean_return").get<double>();
    p.mean_traj_len = pj.at("mean_traj_len").get<double>();
    p.mean_kl = pj.at("mean_kl").get<double>();
    p.clip_fraction = pj.at("clip_fraction").get<double>();
    p.get_memory_share = pj.at("get_memory_share").get<double>();
    p.navigate_share = pj.at("navigate_share").get<double>();
    out.push_back(p);
  }
  return out;
}

}  // namespace asknav
