#include "asknav/env.hpp"

#include <set>

#include "asknav/policy.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace asknav;

TEST_SUITE_BEGIN("env");

namespace {

EpisodeConfig default_config() {
  EpisodeConfig c;
  return c;
}

// plays a fixed action list, then declares the first remaining candidate
class ScriptedPolicy : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<Action> actions) : actions_(std::move(actions)) {}
  void begin_episode() override { i_ = 0; }
  ActionChoice decide(const DecisionContext& ctx, Rng&) override {
    if (i_ < actions_.size()) return ActionChoice{actions_[i_++], 0.0, -1};
    return ActionChoice{make_found(ctx.observation.belief.slots[0].object_id), 0.0, -1};
  }

 private:
  std::vector<Action> actions_;
  size_t i_ = 0;
};

bool observations_equal(const Observation& a, const Observation& b) {
  return a.location_id == b.location_id && a.visible_objects == b.visible_objects &&
         a.belief.n_remaining == b.belief.n_remaining &&
         a.belief.steps_elapsed == b.belief.steps_elapsed && a.belief.slots.size() == b.belief.slots.size();
}

}  // namespace

TEST_CASE("reset: full candidate set, zeroed counters, visible objects at start") {
  SceneGraph s = testfx::colocated_scene();
  Task t = testfx::colocated_task();
  Episode ep(s, t, default_config(), 1);

  CHECK(ep.belief().remaining.size() == 3);
  CHECK(ep.belief().n_asks == 0);
  CHECK(ep.belief().n_mems == 0);
  CHECK(ep.belief().steps_elapsed == 0);
  // all three candidates sit at the start location and must be visible
  std::set<std::string> seen;
  for (const auto& v : ep.observation().visible_objects) seen.insert(v.id);
  for (const auto& id : t.candidate_ids) CHECK(seen.count(id) == 1);
}

TEST_CASE("reset is deterministic: same seed, identical first observation") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task();
  Episode a(s, t, default_config(), 99);
  Episode b(s, t, default_config(), 99);
  CHECK(observations_equal(a.observation(), b.observation()));
}

TEST_CASE("reset validates the task against the scene") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task();
  t.gt_target_id = "fx2_l1";
  CHECK_THROWS_AS(Episode(s, t, default_config(), 1), std::invalid_argument);
}

TEST_CASE("found on the target while co-located succeeds at zero cost") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task(true, true, "fx2_oA");
  Episode ep(s, t, default_config(), 1);
  ep.step(make_get_memory("mug"));
  StepResult nav = ep.step(make_navigate("fx2_l1"));
  CHECK(nav.cost == doctest::Approx(5.0));
  StepResult fin = ep.step(make_found("fx2_oA"));
  CHECK(fin.cost == 0.0);
  CHECK(fin.done);
  CHECK(*fin.outcome == Outcome::Success);
}

TEST_CASE("found on the wrong object fails") {
  SceneGraph s = testfx::colocated_scene();
  Task t = testfx::colocated_task("fx3_o0");
  Episode ep(s, t, default_config(), 1);
  StepResult r = ep.step(make_found("fx3_o1"));
  CHECK(r.done);
  CHECK(*r.outcome == Outcome::Failure);
}

TEST_CASE("found on the target from the wrong location fails") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task(true, true, "fx2_oA");
  Episode ep(s, t, default_config(), 1);
  StepResult r = ep.step(make_found("fx2_oA"));  // still at the doorway
  CHECK(*r.outcome == Outcome::Failure);
}

TEST_CASE("a useful reply prunes candidates with known contradicting attributes") {
  SceneGraph s = testfx::colocated_scene();
  Task t = testfx::colocated_task("fx3_o0");  // red, with blue and green co-visible
  Episode ep(s, t, default_config(), 1);
  StepResult r = ep.step(make_ask_kind("color"));
  CHECK(r.cost == doctest::Approx(0.5));
  REQUIRE(r.observation.last_reply.has_value());
  CHECK(r.observation.last_reply->useful);  // first ask always lands
  CHECK(ep.belief().remaining == std::vector<std::string>{"fx3_o0"});  // shrank by 2
}

TEST_CASE("constraints only prune candidates whose attributes are known") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task(false, false, "fx2_oA");  // no memory at all
  Episode ep(s, t, default_config(), 1);
  ep.step(make_ask_kind("color"));  // says "red"; neither candidate has been seen
  CHECK(ep.belief().remaining.size() == 2);
  // walking to the blue one reveals it and the constraint takes effect
  ep.step(make_navigate("fx2_l2"));
  CHECK(ep.belief().remaining == std::vector<std::string>{"fx2_oA"});
}

TEST_CASE("memory lookup charges c_mem, reports facts, and enables remote pruning") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task(true, true, "fx2_oA");
  Episode ep(s, t, default_config(), 1);
  StepResult ask = ep.step(make_ask_kind("color"));
  CHECK(ep.belief().remaining.size() == 2);  // nothing known yet
  CHECK(ask.cost == doctest::Approx(0.5));
  StepResult mem = ep.step(make_get_memory("mug"));
  CHECK(mem.cost == doctest::Approx(0.01));
  REQUIRE(mem.observation.last_memory.has_value());
  CHECK(mem.observation.last_memory->size() == 2);
  // the blue mug's snapshot contradicts the disclosed color
  CHECK(ep.belief().remaining == std::vector<std::string>{"fx2_oA"});
}

TEST_CASE("memory retrieval cost is charged even when nothing matches") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task(false, false);
  Episode ep(s, t, default_config(), 1);
  StepResult r = ep.step(make_get_memory("mug"));
  CHECK(r.cost == doctest::Approx(0.01));
  REQUIRE(r.observation.last_memory.has_value());
  CHECK(r.observation.last_memory->empty());
}

TEST_CASE("stale memory misdirects navigation but never prunes") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task(false, false, "fx2_oA");
  // stale record: claims the target mug is at the shelf (actually workbench)
  t.memory_seed.push_back({"fx2_oA", "fx2_l2", true});
  Episode ep(s, t, default_config(), 1);
  ep.step(make_get_memory("mug"));
  CHECK(ep.belief().remaining.size() == 2);  // attribute snapshots never exclude the target

  const auto slots = ep.slots();
  REQUIRE(slots[0].location_known);
  CHECK(slots[0].object_id == "fx2_oA");
  CHECK(slots[0].believed_location_id == "fx2_l2");  // misdirected

  ep.step(make_navigate("fx2_l2"));  // arrives, mug absent, record discredited
  for (const auto& slot : ep.slots()) {
    if (slot.object_id == "fx2_oA") CHECK_FALSE(slot.location_known);
  }
  CHECK(ep.belief().remaining.size() == 2);  // still no pruning
}

TEST_CASE("malformed action: charge, strike, same observation, second strike fails") {
  SceneGraph s = testfx::colocated_scene();
  Task t = testfx::colocated_task();
  Episode ep(s, t, default_config(), 1);
  const Observation before = ep.observation();

  StepResult r1 = ep.step(make_navigate("nowhere"));
  CHECK(r1.malformed);
  CHECK(r1.cost == doctest::Approx(0.1));
  CHECK_FALSE(r1.done);
  CHECK(observations_equal(r1.observation, before));
  CHECK(ep.belief().format_strikes == 1);

  SUBCASE("second consecutive malformed action terminates as failure") {
    StepResult r2 = ep.step(make_found("ghost"));
    CHECK(r2.malformed);
    CHECK(r2.done);
    CHECK(*r2.outcome == Outcome::Failure);
  }
  SUBCASE("a valid action resets the strike counter") {
    ep.step(make_get_memory("bottle"));
    CHECK(ep.belief().format_strikes == 0);
    StepResult r3 = ep.step(make_ask_kind("banana"));
    CHECK(r3.malformed);
    CHECK_FALSE(r3.done);
  }
}

TEST_CASE("horizon expiry times the episode out") {
  SceneGraph s = testfx::colocated_scene();
  Task t = testfx::colocated_task();
  EpisodeConfig cfg = default_config();
  cfg.horizon = 1;
  Episode ep(s, t, cfg, 1);
  StepResult r = ep.step(make_get_memory("bottle"));
  CHECK(r.done);
  CHECK(*r.outcome == Outcome::Timeout);
  CHECK_THROWS_AS(ep.step(make_ask_open()), std::logic_error);
}

TEST_CASE("ablation masks turn the removed action kind into a malformed one") {
  SceneGraph s = testfx::colocated_scene();
  Task t = testfx::colocated_task();
  EpisodeConfig cfg = default_config();
  cfg.mask_ask = true;
  Episode ep(s, t, cfg, 1);
  CHECK_FALSE(ep.valid_mask()[kTplAskOpen]);
  CHECK(ep.step(make_ask_open()).malformed);
}

TEST_CASE("template resolution and inversion agree") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task();
  Episode ep(s, t, default_config(), 1);
  ep.step(make_get_memory("mug"));  // believed locations known now

  const auto mask = ep.valid_mask();
  for (int tpl = 0; tpl < kTemplateCount; ++tpl) {
    if (!mask[tpl]) continue;
    const Action a = ep.resolve_template(tpl);
    CHECK(ep.template_of(a) == tpl);
  }
  CHECK_THROWS_AS(ep.resolve_template(kTplNavSlot0 + 4), std::invalid_argument);
}

TEST_CASE("scripted run: ask + memory + navigate + found books exact costs") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task(true, true, "fx2_oA");
  ScriptedPolicy policy({make_ask_kind("color"), make_get_memory("mug"), make_navigate("fx2_l1"),
                         make_found("fx2_oA")});
  EpisodeResult r = run_episode(policy, s, t, default_config(), 5, 6);
  CHECK(r.trajectory.outcome == Outcome::Success);
  CHECK(r.trajectory.total_cost == doctest::Approx(0.5 + 0.01 + 5.0));
  CHECK(r.trajectory.return_value ==
        doctest::Approx(CostParams{}.r_success - (0.5 + 0.01 + 5.0)));
  CHECK(r.decisions.size() == r.trajectory.steps.size());
}

TEST_CASE("walking every candidate books the sum of leg distances") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task(true, true, "fx2_oB");
  ScriptedPolicy policy({make_navigate("fx2_l1"), make_navigate("fx2_l2"), make_found("fx2_oB")});
  EpisodeResult r = run_episode(policy, s, t, default_config(), 5, 6);
  CHECK(r.trajectory.outcome == Outcome::Success);
  CHECK(r.trajectory.total_cost == doctest::Approx(5.0 + 10.0));
}

// -- randomized environment soundness properties ---------------------------

namespace {

struct SoundnessStats {
  int episodes = 0;
  int monotonic_violations = 0;
  int gt_exclusions = 0;
  int repricing_mismatches = 0;
};

class WatchingRandomPolicy : public Policy {
 public:
  ActionChoice decide(const DecisionContext& ctx, Rng& rng) override {
    std::vector<int> valid;
    for (int t = 0; t < kTemplateCount; ++t) {
      if (ctx.valid_mask[t]) valid.push_back(t);
    }
    const int tpl = valid[rng.below(valid.size())];
    return ActionChoice{action_for_template(ctx, tpl),
                        -std::log(static_cast<double>(valid.size())), tpl};
  }
};

SoundnessStats run_soundness(int n_episodes, uint64_t master_seed) {
  Benchmark bench = testfx::tiny_benchmark(master_seed, 4, 2, 4, 6);
  SoundnessStats stats;
  EpisodeConfig cfg;
  WatchingRandomPolicy policy;
  Rng pick(master_seed);

  std::vector<const Task*> all;
  for (const auto& t : bench.train_tasks) all.push_back(&t);
  for (const auto& t : bench.test_tasks) all.push_back(&t);

  for (int e = 0; e < n_episodes; ++e) {
    const Task& task = *all[pick.below(all.size())];
    const SceneGraph& scene = bench.scenes.at(task.scene_id);
    const uint64_t env_seed = derive_seed(master_seed, e, 1);
    const uint64_t pol_seed = derive_seed(master_seed, e, 2);

    Episode ep(scene, task, cfg, env_seed);
    Rng prng(pol_seed);
    size_t last_size = ep.belief().remaining.size();
    double cost_sum = 0.0;
    int n_asks_before = 0;
    std::vector<StepRecord> steps;

    while (!ep.done()) {
      const auto mask = ep.valid_mask();
      DecisionContext ctx{ep.observation(), mask};
      ActionChoice choice = policy.decide(ctx, prng);
      n_asks_before = ep.belief().n_asks;
      StepResult sr = ep.step(choice.action);
      cost_sum += sr.cost;

      if (ep.belief().remaining.size() > last_size) ++stats.monotonic_violations;
      last_size = ep.belief().remaining.size();
      if (!ep.done() &&
          std::find(ep.belief().remaining.begin(), ep.belief().remaining.end(),
                    task.gt_target_id) == ep.belief().remaining.end()) {
        ++stats.gt_exclusions;
      }
      StepRecord rec;
      rec.action = choice.action;
      rec.cost = sr.cost;
      (void)n_asks_before;
      steps.push_back(rec);
    }

    // independent re-pricing of the logged actions
    double repriced = 0.0;
    int asks = 0;
    std::string loc = task.start_location_id;
    for (const auto& srec : steps) {
      switch (srec.action.kind) {
        case ActionKind::Navigate:
          if (scene.has_location(srec.action.location_id)) {
            repriced += action_cost(ActionKind::Navigate, asks,
                                    distance(scene, loc, srec.action.location_id), cfg.cost);
            loc = srec.action.location_id;
          } else {
            repriced += cfg.cost.c_format;
          }
          break;
        case ActionKind::Ask:
          if (srec.action.ask_open || is_attr_kind(srec.action.ask_kind)) {
            repriced += action_cost(ActionKind::Ask, asks, std::nullopt, cfg.cost);
            ++asks;
          } else {
            repriced += cfg.cost.c_format;
          }
          break;
        case ActionKind::GetMemory:
          repriced += action_cost(ActionKind::GetMemory, asks, std::nullopt, cfg.cost);
          break;
        case ActionKind::Found:
          if (scene.has_object(srec.action.object_id)) {
            repriced += 0.0;
          } else {
            repriced += cfg.cost.c_format;
          }
          break;
      }
    }
    if (std::abs(repriced - cost_sum) > 1e-9) ++stats.repricing_mismatches;
    ++stats.episodes;
  }
  return stats;
}

}  // namespace

TEST_CASE("soundness over randomized episodes") {
  SoundnessStats stats = run_soundness(300, 1234);
  CHECK(stats.episodes == 300);
  CHECK(stats.monotonic_violations == 0);
  CHECK(stats.gt_exclusions == 0);
  CHECK(stats.repricing_mismatches == 0);
}

TEST_CASE("episodes are fully determined by task, policy params, and seeds") {
  Benchmark bench = testfx::tiny_benchmark(5);
  const Task& task = bench.train_tasks.front();
  const SceneGraph& scene = bench.scenes.at(task.scene_id);
  RandomPolicy p1, p2;
  EpisodeResult a = run_episode(p1, scene, task, EpisodeConfig{}, 42, 43);
  EpisodeResult b = run_episode(p2, scene, task, EpisodeConfig{}, 42, 43);
  REQUIRE(a.trajectory.steps.size() == b.trajectory.steps.size());
  for (size_t i = 0; i < a.trajectory.steps.size(); ++i) {
    CHECK(a.trajectory.steps[i].action == b.trajectory.steps[i].action);
    CHECK(a.trajectory.steps[i].cost == b.trajectory.steps[i].cost);
  }
  CHECK(a.trajectory.outcome == b.trajectory.outcome);
  CHECK(a.trajectory.return_value == b.trajectory.return_value);
}

TEST_SUITE_END();
