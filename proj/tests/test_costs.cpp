#include "asknav/costs.hpp"

#include <cmath>

#include "asknav/rng.hpp"
#include "doctest.h"

using namespace asknav;

TEST_SUITE_BEGIN("costs");

namespace {

Trajectory make_traj(Outcome outcome, const std::vector<double>& costs) {
  Trajectory t;
  t.outcome = outcome;
  for (double c : costs) {
    StepRecord s;
    s.action = make_get_memory("x");
    s.cost = c;
    t.steps.push_back(s);
    t.total_cost += c;
  }
  return t;
}

}  // namespace

TEST_CASE("per-action pricing with the default constants") {
  const CostParams p;
  CHECK(action_cost(ActionKind::Navigate, 0, 2.0, p) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(action_cost(ActionKind::Ask, 0, std::nullopt, p) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(action_cost(ActionKind::Ask, 2, std::nullopt, p) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(action_cost(ActionKind::GetMemory, 0, std::nullopt, p) == doctest::Approx(0.01));
  CHECK(action_cost(ActionKind::Found, 5, std::nullopt, p) == 0.0);
}

TEST_CASE("pricing rejects bad arguments") {
  const CostParams p;
  CHECK_THROWS_AS(action_cost(ActionKind::Navigate, 0, -1.0, p), std::invalid_argument);
  CHECK_THROWS_AS(action_cost(ActionKind::Navigate, 0, std::nullopt, p), std::invalid_argument);
  CHECK_THROWS_AS(action_cost(ActionKind::Ask, 0, 1.0, p), std::invalid_argument);
}

TEST_CASE("ask fatigue is strictly increasing when alpha > 0") {
  const CostParams p;
  for (int n = 0; n < 8; ++n) {
    CHECK(action_cost(ActionKind::Ask, n + 1, std::nullopt, p) >
          action_cost(ActionKind::Ask, n, std::nullopt, p));
  }
}

TEST_CASE("trajectory return: sparse reward minus weighted costs") {
  const CostParams p;
  CHECK(trajectory_return(make_traj(Outcome::Success, {0.5, 0.01, 1.0}), p) ==
        doctest::Approx(-0.51).epsilon(1e-12));
  CHECK(trajectory_return(make_traj(Outcome::Failure, {}), p) == doctest::Approx(-0.1));
  CHECK(trajectory_return(make_traj(Outcome::Success, {}), p) == doctest::Approx(1.0));
  CHECK(trajectory_return(make_traj(Outcome::Timeout, {1.0}), p) == doctest::Approx(-1.1));
}

TEST_CASE("adding a step never increases the return") {
  const CostParams p;
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Trajectory t = make_traj(rng.bernoulli(0.5) ? Outcome::Success : Outcome::Failure,
                             {rng.uniform(0, 2), rng.uniform(0, 2)});
    const double before = trajectory_return(t, p);
    StepRecord extra;
    extra.action = make_ask_open();
    extra.cost = rng.uniform(0, 3);
    t.steps.push_back(extra);
    CHECK(trajectory_return(t, p) <= before);
  }
}

TEST_CASE("metrics reproduce the derivable reference rows") {
  const CostParams p;
  // 1000 episodes at SR=0.600 with successful-episode mean cost 3.3
  std::vector<Trajectory> eps;
  for (int i = 0; i < 600; ++i) eps.push_back(make_traj(Outcome::Success, {3.3}));
  for (int i = 0; i < 400; ++i) eps.push_back(make_traj(Outcome::Failure, {1.0}));
  MetricsReport r = compute_metrics(eps, p);
  CHECK(r.sr == doctest::Approx(0.600));
  CHECK(*r.ttc == doctest::Approx(3.3));
  CHECK(r.swc == doctest::Approx(0.36).epsilon(0.02));  // 0.6*2.0/3.3 = 0.3636

  std::vector<Trajectory> eps2;
  for (int i = 0; i < 565; ++i) eps2.push_back(make_traj(Outcome::Success, {2.5}));
  for (int i = 0; i < 435; ++i) eps2.push_back(make_traj(Outcome::Failure, {1.0}));
  MetricsReport r2 = compute_metrics(eps2, p);
  CHECK(r2.swc == doctest::Approx(0.452).epsilon(1e-9));
}

TEST_CASE("no successes: SR 0, SwC 0, TTC absent") {
  const CostParams p;
  std::vector<Trajectory> eps = {make_traj(Outcome::Failure, {1.0}),
                                 make_traj(Outcome::Timeout, {2.0})};
  MetricsReport r = compute_metrics(eps, p);
  CHECK(r.sr == 0.0);
  CHECK(r.swc == 0.0);
  CHECK_FALSE(r.ttc.has_value());
}

TEST_CASE("empty episode list is an argument error") {
  CHECK_THROWS_AS(compute_metrics({}, CostParams{}), std::invalid_argument);
}

TEST_CASE("SwC never exceeds SR; equality exactly when TTC <= c_ref") {
  const CostParams p;
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Trajectory> eps;
    const int n = 5 + static_cast<int>(rng.below(20));
    for (int i = 0; i < n; ++i) {
      eps.push_back(make_traj(rng.bernoulli(0.7) ? Outcome::Success : Outcome::Failure,
                              {rng.uniform(0.0, 5.0)}));
    }
    MetricsReport r = compute_metrics(eps, p);
    CHECK(r.swc <= r.sr + 1e-12);
    if (r.ttc.has_value()) {
      if (*r.ttc <= p.c_ref) {
        CHECK(r.swc == doctest::Approx(r.sr).epsilon(1e-12));
      } else {
        CHECK(r.swc < r.sr);
      }
    }
  }
}

TEST_CASE("metrics over a concatenation equal the weighted combination") {
  const CostParams p;
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto sample = [&](int n) {
      std::vector<Trajectory> eps;
      for (int i = 0; i < n; ++i) {
        eps.push_back(make_traj(rng.bernoulli(0.6) ? Outcome::Success : Outcome::Failure,
                                {rng.uniform(0.5, 4.0)}));
      }
      return eps;
    };
    auto a = sample(3 + static_cast<int>(rng.below(6)));
    auto b = sample(3 + static_cast<int>(rng.below(6)));
    std::vector<Trajectory> both = a;
    both.insert(both.end(), b.begin(), b.end());

    MetricsReport ra = compute_metrics(a, p);
    MetricsReport rb = compute_metrics(b, p);
    MetricsReport rc = compute_metrics(both, p);

    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    CHECK(rc.sr == doctest::Approx((ra.sr * na + rb.sr * nb) / (na + nb)).epsilon(1e-12));

    const double sa = ra.sr * na, sb = rb.sr * nb;  // success counts
    if (sa + sb > 0) {
      const double ttc_a = ra.ttc.value_or(0.0), ttc_b = rb.ttc.value_or(0.0);
      CHECK(*rc.ttc ==
            doctest::Approx((ttc_a * sa + ttc_b * sb) / (sa + sb)).epsilon(1e-9));
    }
  }
}

TEST_CASE("seed aggregation: mean and sample standard deviation") {
  MetricsReport a;
  a.seed = 1;
  a.sr = 0.6;
  a.swc = 0.3;
  a.ttc = 2.0;
  a.traj_len_mean = 5.0;
  a.n_episodes = 10;
  MetricsReport b = a;
  b.seed = 2;
  b.sr = 0.62;

  MetricsReport agg = aggregate_seeds({a, b});
  CHECK(agg.mean_std.at("sr_mean") == doctest::Approx(0.61));
  CHECK(agg.mean_std.at("sr_std") == doctest::Approx(0.0141421).epsilon(1e-4));
  CHECK(agg.per_seed.size() == 2);

  MetricsReport same = aggregate_seeds({a, a, a});
  CHECK(same.mean_std.at("sr_std") == doctest::Approx(0.0));
  CHECK(same.mean_std.at("swc_std") == doctest::Approx(0.0));

  MetricsReport single = aggregate_seeds({a});
  CHECK(single.sr == a.sr);
  CHECK(single.mean_std.at("sr_std") == 0.0);
}

TEST_CASE("metrics report json round-trip") {
  MetricsReport r;
  r.sr = 0.5;
  r.swc = 0.25;
  r.ttc = 3.0;
  r.traj_len_mean = 4.5;
  r.n_episodes = 8;
  r.action_histogram["ask"] = 3;
  MetricsReport::DifficultyRow row;
  row.n_tasks = 4;
  row.sr = 0.75;
  row.ttc = 2.0;
  r.per_difficulty["easy"] = row;
  MetricsReport back = metrics_from_json_text(metrics_to_json_text(r));
  CHECK(back.sr == r.sr);
  CHECK(back.swc == r.swc);
  CHECK(*back.ttc == *r.ttc);
  CHECK(back.per_difficulty.at("easy").n_tasks == 4);
}

TEST_CASE("cost params validation enforces the pricing order") {
  CostParams p;
  CHECK_NOTHROW(p.validate());
  p.c_mem = 0.6;  // above the ask base
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = CostParams{};
  p.c_nav = 0.4;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_SUITE_END();
