#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "asknav/planner.hpp"
#include "asknav/policy.hpp"

namespace asknav {

struct SftConfig {
  double learning_rate = 0.5;
  int epochs = 1;
  int batch_size = 16;
  double warmup_ratio = 0.1;    // linear warmup fraction of total steps
  double final_lr_ratio = 0.1;  // cosine decays to this fraction of the peak
  uint64_t shuffle_seed = 17;
};

struct SftResult {
  PolicyParams params;
  double final_loss = 0.0;
  std::vector<double> loss_curve;  // per optimization step
};

// Cross-entropy fit of the masked softmax policy to expert decisions.
SftResult sft_fit(const std::vector<ExpertTrace>& corpus, const PolicyParams& init,
                  const SftConfig& config);

struct GrpoConfig {
  int group_size = 8;            // G
  double learning_rate = 0.05;   // tuned for the linear policy
  double clip_epsilon = 0.2;
  double kl_beta = 0.1;
  double entropy_coef = 0.01;
  double advantage_epsilon = 1e-8;
  int epochs = 80;               // passes over the task pool
  int inner_steps = 4;           // gradient steps per collected batch
  int tasks_per_batch = 8;
  double gamma = 0.99;           // accepted but unused: returns are undiscounted sums
  double kl_bound = 2.0;         // reported anchor bound, nats
  double log_ratio_clamp = 20.0;

  void validate() const;
};

// One policy decision kept for the update.
struct TrainStep {
  std::vector<double> features;
  std::vector<bool> mask;
  int template_index = -1;
  double log_prob_old = 0.0;  // under the sampling policy snapshot
};

// G trajectories rolled on one task with their rewards and group-relative
// advantages.
struct GroupSample {
  std::string task_id;
  std::vector<std::vector<TrainStep>> trajectories;  // G entries
  std::vector<double> rewards;                       // G entries
  std::vector<double> advantages;                    // filled by group_advantages
};

// A_i = (r_i - mean) / (population std + epsilon).
std::vector<double> group_advantages(const std::vector<double>& rewards,
                                     double advantage_epsilon);

struct GrpoStats {
  double mean_return = 0.0;
  double mean_kl = 0.0;          // exact KL(pi_theta || pi_ref) over visited states
  double clip_fraction = 0.0;
  double mean_traj_len = 0.0;
  double mean_entropy = 0.0;
  int ratio_clamps = 0;          // log-ratio overflow guard hits
};

// One ascent step on the clipped surrogate minus the KL penalty plus the
// entropy bonus. Groups must have advantages filled in.
std::pair<PolicyParams, GrpoStats> grpo_update(const PolicyParams& params,
                                               const PolicyParams& ref_params,
                                               const std::vector<GroupSample>& groups,
                                               const GrpoConfig& config);

struct CurvePoint {
  int iteration = 0;
  double mean_return = 0.0;
  double mean_traj_len = 0.0;
  double mean_kl = 0.0;
  double clip_fraction = 0.0;
  double get_memory_share = 0.0;
  double navigate_share = 0.0;
};

struct TrainResult {
  PolicyParams params;
  std::vector<CurvePoint> curve;
  double final_mean_kl = 0.0;
};

using IterationCallback = std::function<void(const CurvePoint&)>;

// Stage II: online optimization. The SFT parameters are both the starting
// point and the frozen reference policy.
TrainResult train_hc_grpo(const std::vector<Task>& tasks,
                          const std::map<std::string, SceneGraph>& scenes,
                          const PolicyParams& sft_params, const EpisodeConfig& env_config,
                          const GrpoConfig& config, uint64_t master_seed, int workers,
                          const IterationCallback& callback = nullptr);

// Two-column tables of the training curve (iteration vs mean return, and
// iteration vs mean trajectory length).
std::string curve_to_table(const std::vector<CurvePoint>& curve);
std::string curve_to_json_text(const std::vector<CurvePoint>& curve);
std::vector<CurvePoint> curve_from_json_text(const std::string& text);

}  // namespace asknav
