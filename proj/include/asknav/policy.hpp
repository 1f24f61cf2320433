#pragma once

#include <string>
#include <vector>

#include "asknav/env.hpp"

namespace asknav {

// Fixed-order scalar features of the belief view. Distances are normalized
// by the scene diameter; counters by the horizon.
inline constexpr int kFeatureCount = 18;
std::vector<double> featurize(const BeliefView& belief);
std::vector<std::string> feature_names();

// Weight matrix of the featurized categorical policy, row per template.
struct PolicyParams {
  int n_templates = kTemplateCount;
  int n_features = kFeatureCount;
  std::vector<double> weights;  // row-major, n_templates x n_features
  double temperature = 1.0;
  std::string version_tag = "init";

  static PolicyParams zeros(int templates = kTemplateCount, int features = kFeatureCount);
  double& at(int tpl, int feat) { return weights[tpl * n_features + feat]; }
  double at(int tpl, int feat) const { return weights[tpl * n_features + feat]; }
  void validate() const;

  bool operator==(const PolicyParams&) const = default;
};

// Masked softmax of (W f) / temperature; invalid templates get exactly zero.
std::vector<double> action_distribution(const PolicyParams& params,
                                        const std::vector<double>& features,
                                        const std::vector<bool>& mask);

std::pair<int, double> sample_template(const PolicyParams& params,
                                       const std::vector<double>& features,
                                       const std::vector<bool>& mask, Rng& rng);

double log_prob_of(const PolicyParams& params, const std::vector<double>& features,
                   const std::vector<bool>& mask, int tpl);

// d log pi(tpl | f) / d W, same shape as weights. Masked rows are zero.
std::vector<double> grad_log_prob(const PolicyParams& params, const std::vector<double>& features,
                                  const std::vector<bool>& mask, int tpl);

double entropy_of(const std::vector<double>& probs);
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

// Learned policy acting through the template set.
class SoftmaxPolicy : public Policy {
 public:
  explicit SoftmaxPolicy(PolicyParams params) : params_(std::move(params)) {}
  ActionChoice decide(const DecisionContext& ctx, Rng& rng) override;
  const PolicyParams& params() const { return params_; }

 private:
  PolicyParams params_;
};

// Asks one open clarification question first, then walks candidates in
// distance order, declaring on co-location with a consistent candidate.
class HeuristicAskThenExplore : public Policy {
 public:
  ActionChoice decide(const DecisionContext& ctx, Rng& rng) override;
};

// Uniform over the valid templates.
class RandomPolicy : public Policy {
 public:
  ActionChoice decide(const DecisionContext& ctx, Rng& rng) override;
};

// Resolves a template index into a concrete action for the observation the
// mask was computed from. Used by template-level policies.
Action action_for_template(const DecisionContext& ctx, int tpl);

// Checkpoint persistence (format_version 1). Extra payload entries (training
// curve, resolved config) ride along untouched.
std::string params_to_text(const PolicyParams& params, const std::string& extra_json = "");
PolicyParams params_from_text(const std::string& text);
void save_params(const PolicyParams& params, const std::string& path,
                 const std::string& extra_json = "");
PolicyParams load_params(const std::string& path);

}  // namespace asknav
