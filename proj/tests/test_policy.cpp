#include "asknav/policy.hpp"

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"

using namespace asknav;

TEST_SUITE_BEGIN("policy");

namespace {

std::vector<double> random_features(Rng& rng, int n = kFeatureCount) {
  std::vector<double> f(n);
  for (auto& x : f) x = rng.uniform(-1.0, 1.0);
  f.back() = 1.0;
  return f;
}

std::vector<bool> random_mask(Rng& rng, int n = kTemplateCount) {
  std::vector<bool> m(n);
  int count = 0;
  for (size_t i = 0; i < m.size(); ++i) {
    m[i] = rng.bernoulli(0.6);
    count += m[i];
  }
  if (count == 0) m[rng.below(m.size())] = true;
  return m;
}

PolicyParams random_params(Rng& rng, int templates = kTemplateCount,
                           int features = kFeatureCount) {
  PolicyParams p = PolicyParams::zeros(templates, features);
  for (auto& w : p.weights) w = rng.uniform(-1.5, 1.5);
  return p;
}

}  // namespace

TEST_CASE("zero weights give the uniform distribution over valid templates") {
  PolicyParams p = PolicyParams::zeros();
  std::vector<double> f(kFeatureCount, 0.3);
  std::vector<bool> mask(kTemplateCount, false);
  mask[0] = mask[4] = mask[11] = true;
  auto probs = action_distribution(p, f, mask);
  CHECK(probs[0] == doctest::Approx(1.0 / 3));
  CHECK(probs[4] == doctest::Approx(1.0 / 3));
  CHECK(probs[11] == doctest::Approx(1.0 / 3));
  double sum = 0;
  for (double q : probs) sum += q;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a single valid template takes probability one") {
  Rng rng(1);
  PolicyParams p = random_params(rng);
  std::vector<bool> mask(kTemplateCount, false);
  mask[7] = true;
  auto probs = action_distribution(p, random_features(rng), mask);
  CHECK(probs[7] == doctest::Approx(1.0));
}

TEST_CASE("masked templates get exactly zero probability") {
  Rng rng(2);
  PolicyParams p = random_params(rng);
  auto mask = random_mask(rng);
  auto probs = action_distribution(p, random_features(rng), mask);
  for (int t = 0; t < kTemplateCount; ++t) {
    if (!mask[t]) CHECK(probs[t] == 0.0);
  }
}

TEST_CASE("an all-masked request is an argument error") {
  PolicyParams p = PolicyParams::zeros();
  std::vector<bool> mask(kTemplateCount, false);
  CHECK_THROWS_AS(action_distribution(p, std::vector<double>(kFeatureCount, 0.0), mask),
                  std::invalid_argument);
}

TEST_CASE("adding a constant to every logit leaves the distribution unchanged") {
  Rng rng(3);
  PolicyParams p = random_params(rng);
  auto f = random_features(rng);
  auto mask = random_mask(rng);
  auto probs = action_distribution(p, f, mask);

  PolicyParams shifted = p;
  // the bias feature is fixed at 1, so shifting its column shifts all logits
  for (int t = 0; t < shifted.n_templates; ++t) shifted.at(t, kFeatureCount - 1) += 7.3;
  REQUIRE(f.back() == 1.0);
  auto probs2 = action_distribution(shifted, f, mask);
  for (int t = 0; t < kTemplateCount; ++t) CHECK(probs2[t] == doctest::Approx(probs[t]).epsilon(1e-12));
}

TEST_CASE("10k samples from a known distribution pass a chi-square fit") {
  Rng rng(4);
  PolicyParams p = random_params(rng);
  auto f = random_features(rng);
  std::vector<bool> mask(kTemplateCount, false);
  mask[0] = mask[3] = mask[4] = mask[10] = true;
  const auto probs = action_distribution(p, f, mask);

  Rng sampler(99);
  std::map<int, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    auto [tpl, logp] = sample_template(p, f, mask, sampler);
    counts[tpl]++;
    CHECK(logp == doctest::Approx(std::log(probs[tpl])));
  }
  double chi2 = 0.0;
  for (int t : {0, 3, 4, 10}) {
    const double expected = probs[t] * n;
    const double diff = counts[t] - expected;
    chi2 += diff * diff / expected;
  }
  // chi-square critical value, 3 degrees of freedom, alpha = 0.01
  CHECK(chi2 < 11.345);
}

TEST_CASE("log_prob_of the sampled template equals the recorded log-probability") {
  Rng rng(5);
  PolicyParams p = random_params(rng);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = random_features(rng);
    auto mask = random_mask(rng);
    auto [tpl, logp] = sample_template(p, f, mask, rng);
    CHECK(log_prob_of(p, f, mask, tpl) == logp);
  }
}

TEST_CASE("log_prob_of a masked template is rejected") {
  PolicyParams p = PolicyParams::zeros();
  std::vector<bool> mask(kTemplateCount, true);
  mask[2] = false;
  CHECK_THROWS_AS(log_prob_of(p, std::vector<double>(kFeatureCount, 0.1), mask, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(log_prob_of(p, std::vector<double>(kFeatureCount, 0.1), mask, -1),
                  std::invalid_argument);
}

TEST_CASE("temperature to zero concentrates on the argmax template") {
  Rng rng(6);
  PolicyParams p = random_params(rng);
  auto f = random_features(rng);
  std::vector<bool> mask(kTemplateCount, true);
  p.temperature = 1e-6;
  auto probs = action_distribution(p, f, mask);
  int argmax = 0;
  for (int t = 1; t < kTemplateCount; ++t) {
    if (probs[t] > probs[argmax]) argmax = t;
  }
  CHECK(probs[argmax] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("analytic gradient of log pi matches central finite differences") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    PolicyParams p = random_params(rng);
    p.temperature = trial % 2 == 0 ? 1.0 : 0.7;
    auto f = random_features(rng);
    auto mask = random_mask(rng);
    int tpl = -1;
    for (int t = 0; t < kTemplateCount; ++t) {
      if (mask[t]) tpl = t;
    }
    const auto grad = grad_log_prob(p, f, mask, tpl);

    const double h = 1e-6;
    for (int t = 0; t < p.n_templates; ++t) {
      for (int j = 0; j < p.n_features; ++j) {
        PolicyParams lo = p, hi = p;
        lo.at(t, j) -= h;
        hi.at(t, j) += h;
        const double fd =
            (log_prob_of(hi, f, mask, tpl) - log_prob_of(lo, f, mask, tpl)) / (2 * h);
        const double an = grad[t * p.n_features + j];
        if (!mask[t]) {
          CHECK(an == 0.0);  // masked rows carry no gradient
          CHECK(std::abs(fd) < 1e-9);
        } else {
          const double scale = std::max({1.0, std::abs(fd), std::abs(an)});
          CHECK(std::abs(an - fd) / scale < 1e-5);
        }
      }
    }
  }
}

TEST_CASE("heuristic always asks first") {
  Benchmark bench = testfx::tiny_benchmark(21);
  HeuristicAskThenExplore heuristic;
  Rng rng(0);
  for (const auto& task : bench.test_tasks) {
    const SceneGraph& scene = bench.scenes.at(task.scene_id);
    Episode ep(scene, task, EpisodeConfig{}, 9);
    DecisionContext ctx{ep.observation(), ep.valid_mask()};
    ActionChoice c = heuristic.decide(ctx, rng);
    CHECK(c.action.kind == ActionKind::Ask);
    CHECK(c.action.ask_open);
  }
}

TEST_CASE("heuristic navigates to the unique survivor after a useful reply") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task(true, true, "fx2_oA");
  Episode ep(s, t, EpisodeConfig{}, 1);
  HeuristicAskThenExplore heuristic;
  Rng rng(0);
  // seed memory lookup first so both locations are known to the belief
  ep.step(make_get_memory("mug"));
  ep.step(make_ask_kind("color"));  // prunes to the red mug at l1
  DecisionContext ctx{ep.observation(), ep.valid_mask()};
  ActionChoice c = heuristic.decide(ctx, rng);
  CHECK(c.action.kind == ActionKind::Navigate);
  CHECK(c.action.location_id == "fx2_l1");
}

TEST_CASE("baselines never emit malformed actions") {
  Benchmark bench = testfx::tiny_benchmark(31, 3, 1, 3, 4);
  HeuristicAskThenExplore heuristic;
  RandomPolicy random;
  EpisodeConfig cfg;
  int checked = 0;
  for (const auto& task : bench.train_tasks) {
    const SceneGraph& scene = bench.scenes.at(task.scene_id);
    for (Policy* policy : {static_cast<Policy*>(&heuristic), static_cast<Policy*>(&random)}) {
      for (uint64_t seed = 0; seed < 4; ++seed) {
        EpisodeResult r = run_episode(*policy, scene, task, cfg, seed, seed + 100);
        for (const auto& step : r.trajectory.steps) {
          CHECK(step.observation_summary.find("malformed") == std::string::npos);
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("checkpoints round-trip bit for bit") {
  Rng rng(8);
  PolicyParams p = random_params(rng);
  p.version_tag = "rl";
  p.temperature = 0.5;
  const std::string path = "policy_roundtrip_test.json";
  save_params(p, path, R"({"note":"test"})");
  PolicyParams back = load_params(path);
  CHECK(back == p);
  std::filesystem::remove(path);
}

TEST_CASE("featurize has fixed dimension and finite, padded entries") {
  BeliefView b;
  b.n_remaining = 2;
  b.horizon = 12;
  b.scene_diameter = 4.0;
  BeliefSlot s1;
  s1.object_id = "a";
  s1.location_known = true;
  s1.distance = 2.0;
  b.slots = {s1};
  auto f = featurize(b);
  REQUIRE(f.size() == kFeatureCount);
  for (double x : f) CHECK(std::isfinite(x));
  CHECK(f[4] == doctest::Approx(0.5));  // 2.0 / 4.0
  CHECK(f[5] == 1.0);                   // padded slots read as max distance
  CHECK(f[9] == 1.0);
  CHECK(f[10] == 0.0);
  CHECK(f.back() == 1.0);
  CHECK(feature_names().size() == kFeatureCount);
}

TEST_SUITE_END();
