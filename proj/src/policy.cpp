#include "asknav/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace asknav {

using nlohmann::json;

std::vector<std::string> feature_names() {
  std::vector<std::string> names = {"n_remaining", "inv_remaining", "n_asks", "n_mems"};
  for (int i = 1; i <= kSlotCount; ++i) names.push_back("slot" + std::to_string(i) + "_dist");
  for (int i = 1; i <= kSlotCount; ++i) names.push_back("slot" + std::to_string(i) + "_known");
  names.push_back("constrained_frac");
  names.push_back("step_frac");
  names.push_back("last_ask_useful");
  names.push_back("bias");
  return names;
}

std::vector<double> featurize(const BeliefView& b) {
  std::vector<double> f(kFeatureCount, 0.0);
  const double n = std::max(1, b.n_remaining);
  const double horizon = std::max(1, b.horizon);
  const double diam = b.scene_diameter > 0.0 ? b.scene_diameter : 1.0;
  f[0] = n / static_cast<double>(kSlotCount);
  f[1] = 1.0 / n;
  f[2] = std::min<double>(b.n_asks, horizon) / horizon;
  f[3] = std::min<double>(b.n_mems, horizon) / horizon;
  for (int i = 0; i < kSlotCount; ++i) {
    if (i < static_cast<int>(b.slots.size())) {
      f[4 + i] = std::min(b.slots[i].distance / diam, 1.0);
      f[9 + i] = b.slots[i].location_known ? 1.0 : 0.0;
    } else {
      f[4 + i] = 1.0;
      f[9 + i] = 0.0;
    }
  }
  f[14] = static_cast<double>(b.n_constraints) / kAttrKindCount;
  f[15] = static_cast<double>(b.steps_elapsed) / horizon;
  f[16] = b.last_ask_useful ? 1.0 : 0.0;
  f[17] = 1.0;
  return f;
}

PolicyParams PolicyParams::zeros(int templates, int features) {
  PolicyParams p;
  p.n_templates = templates;
  p.n_features = features;
  p.weights.assign(static_cast<size_t>(templates) * features, 0.0);
  return p;
}

void PolicyParams::validate() const {
  if (n_templates <= 0 || n_features <= 0) {
    throw std::invalid_argument("policy params: nonpositive shape");
  }
  if (weights.size() != static_cast<size_t>(n_templates) * n_features) {
    throw std::invalid_argument("policy params: weight size mismatch");
  }
  if (!(temperature > 0.0)) throw std::invalid_argument("policy params: temperature must be > 0");
  for (double w : weights) {
    if (!std::isfinite(w)) throw std::invalid_argument("policy params: non-finite weight");
  }
}

namespace {

std::vector<double> masked_logits(const PolicyParams& p, const std::vector<double>& f,
                                  const std::vector<bool>& mask) {
  if (static_cast<int>(f.size()) != p.n_features) {
    throw std::invalid_argument("feature dimension mismatch");
  }
  if (static_cast<int>(mask.size()) != p.n_templates) {
    throw std::invalid_argument("mask dimension mismatch");
  }
  bool any = false;
  for (bool m : mask) any = any || m;
  if (!any) throw std::invalid_argument("all templates masked");
  std::vector<double> z(p.n_templates, -std::numeric_limits<double>::infinity());
  for (int t = 0; t < p.n_templates; ++t) {
    if (!mask[t]) continue;
    double dot = 0.0;
    for (int j = 0; j < p.n_features; ++j) dot += p.at(t, j) * f[j];
    z[t] = dot / p.temperature;
  }
  return z;
}

}  // namespace

std::vector<double> action_distribution(const PolicyParams& params,
                                        const std::vector<double>& features,
                                        const std::vector<bool>& mask) {
  const auto z = masked_logits(params, features, mask);
  double zmax = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < params.n_templates; ++t) {
    if (mask[t]) zmax = std::max(zmax, z[t]);
  }
  std::vector<double> p(params.n_templates, 0.0);
  double denom = 0.0;
  for (int t = 0; t < params.n_templates; ++t) {
    if (!mask[t]) continue;
    p[t] = std::exp(z[t] - zmax);
    denom += p[t];
  }
  for (int t = 0; t < params.n_templates; ++t) p[t] /= denom;
  return p;
}

std::pair<int, double> sample_template(const PolicyParams& params,
                                       const std::vector<double>& features,
                                       const std::vector<bool>& mask, Rng& rng) {
  const auto probs = action_distribution(params, features, mask);
  const double u = rng.uniform01();
  double acc = 0.0;
  int chosen = -1;
  for (int t = 0; t < params.n_templates; ++t) {
    if (!mask[t]) continue;
    acc += probs[t];
    if (u <= acc) {
      chosen = t;
      break;
    }
  }
  if (chosen < 0) {  // numerical tail: fall back to the last valid template
    for (int t = params.n_templates - 1; t >= 0; --t) {
      if (mask[t]) {
        chosen = t;
        break;
      }
    }
  }
  return {chosen, std::log(probs[chosen])};
}

double log_prob_of(const PolicyParams& params, const std::vector<double>& features,
                   const std::vector<bool>& mask, int tpl) {
  if (tpl < 0 || tpl >= params.n_templates || !mask[tpl]) {
    throw std::invalid_argument("log_prob_of: template is masked or out of range");
  }
  const auto probs = action_distribution(params, features, mask);
  return std::log(probs[tpl]);
}

std::vector<double> grad_log_prob(const PolicyParams& params, const std::vector<double>& features,
                                  const std::vector<bool>& mask, int tpl) {
  if (tpl < 0 || tpl >= params.n_templates || !mask[tpl]) {
    throw std::invalid_argument("grad_log_prob: template is masked or out of range");
  }
  const auto probs = action_distribution(params, features, mask);
  std::vector<double> g(params.weights.size(), 0.0);
  for (int t = 0; t < params.n_templates; ++t) {
    if (!mask[t]) continue;
    const double coef = ((t == tpl ? 1.0 : 0.0) - probs[t]) / params.temperature;
    for (int j = 0; j < params.n_features; ++j) {
      g[t * params.n_features + j] = coef * features[j];
    }
  }
  return g;
}

double entropy_of(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
      kl += p[i] * std::log(p[i] / q[i]);
    }
  }
  return kl;
}

Action action_for_template(const DecisionContext& ctx, int tpl) {
  const BeliefView& b = ctx.observation.belief;
  if (tpl < 0 || tpl >= kTemplateCount || !ctx.valid_mask[tpl]) {
    throw std::invalid_argument("action_for_template: invalid template " + std::to_string(tpl));
  }
  if (tpl >= kTplAskColor && tpl < kTplAskOpen) return make_ask_kind(kAttrKinds[tpl - kTplAskColor]);
  if (tpl == kTplAskOpen) return make_ask_open();
  if (tpl == kTplGetMemory) return make_get_memory(b.category);
  if (tpl >= kTplNavSlot0 && tpl < kTplNavSlot0 + kSlotCount) {
    return make_navigate(b.slots[tpl - kTplNavSlot0].believed_location_id);
  }
  if (tpl == kTplNavExplore) return make_navigate(b.explore_target);
  return make_found(b.slots[tpl - kTplFoundSlot0].object_id);
}

ActionChoice SoftmaxPolicy::decide(const DecisionContext& ctx, Rng& rng) {
  const auto f = featurize(ctx.observation.belief);
  auto [tpl, logp] = sample_template(params_, f, ctx.valid_mask, rng);
  return ActionChoice{action_for_template(ctx, tpl), logp, tpl};
}

ActionChoice HeuristicAskThenExplore::decide(const DecisionContext& ctx, Rng&) {
  const BeliefView& b = ctx.observation.belief;
  auto pick = [&](int tpl) { return ActionChoice{action_for_template(ctx, tpl), 0.0, tpl}; };

  if (b.steps_elapsed == 0 && ctx.valid_mask[kTplAskOpen]) return pick(kTplAskOpen);
  // declare on co-location with a consistent candidate
  for (int i = 0; i < kSlotCount; ++i) {
    if (ctx.valid_mask[kTplFoundSlot0 + i] && i < static_cast<int>(b.slots.size()) &&
        b.slots[i].co_located) {
      return pick(kTplFoundSlot0 + i);
    }
  }
  // nearest candidate with a believed location
  for (int i = 0; i < kSlotCount; ++i) {
    if (ctx.valid_mask[kTplNavSlot0 + i]) return pick(kTplNavSlot0 + i);
  }
  if (ctx.valid_mask[kTplNavExplore]) return pick(kTplNavExplore);
  // exhausted: declare the nearest remaining candidate
  for (int i = 0; i < kSlotCount; ++i) {
    if (ctx.valid_mask[kTplFoundSlot0 + i]) return pick(kTplFoundSlot0 + i);
  }
  // remaining set is never empty, so found slot 1 is always valid
  return pick(kTplFoundSlot0);
}

ActionChoice RandomPolicy::decide(const DecisionContext& ctx, Rng& rng) {
  std::vector<int> valid;
  for (int t = 0; t < kTemplateCount; ++t) {
    if (ctx.valid_mask[t]) valid.push_back(t);
  }
  const int tpl = valid[rng.below(valid.size())];
  return ActionChoice{action_for_template(ctx, tpl), -std::log(static_cast<double>(valid.size())),
                      tpl};
}

std::string params_to_text(const PolicyParams& params, const std::string& extra_json) {
  params.validate();
  json j;
  j["format_version"] = 1;
  j["n_templates"] = params.n_templates;
  j["n_features"] = params.n_features;
  j["temperature"] = params.temperature;
  j["version_tag"] = params.version_tag;
  j["weights"] = params.weights;
  if (!extra_json.empty()) j["extra"] = json::parse(extra_json);
  return j.dump(2) + "\n";
}

PolicyParams params_from_text(const std::string& text) {
  json j = json::parse(text);
  if (!j.contains("format_version") || j.at("format_version").get<int>() != 1) {
    throw std::invalid_argument("checkpoint: unsupported format_version");
  }
  PolicyParams p;
  p.n_templates = j.at("n_templates").get<int>();
  p.n_features = j.at("n_features").get<int>();
  p.temperature = j.at("temperature").get<double>();
  p.version_tag = j.at("version_tag").get<std::string>();
  p.weights = j.at("weights").get<std::vector<double>>();
  p.validate();
  return p;
}

void save_params(const PolicyParams& params, const std::string& path,
                 const std::string& extra_json) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << params_to_text(params, extra_json);
}

PolicyParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return params_from_text(ss.str());
}

}  // namespace asknav
