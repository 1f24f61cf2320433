#include "asknav/scene.hpp"

#include "asknav/rng.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace asknav;

TEST_SUITE_BEGIN("scene");

TEST_CASE("distance identity and pythagorean case") {
  SceneGraph s = testfx::colocated_scene();
  CHECK(distance(s, "fx3_l0", "fx3_l0") == 0.0);
  CHECK(distance(s, "fx3_l0", "fx3_l1") == doctest::Approx(5.0));  // (0,0) to (3,4)
  CHECK(distance(s, "fx3_l1", "fx3_l0") == distance(s, "fx3_l0", "fx3_l1"));
}

TEST_CASE("distance throws on unknown ids") {
  SceneGraph s = testfx::two_mug_scene();
  CHECK_THROWS_WITH_AS(distance(s, "nope", "fx2_l0"), doctest::Contains("nope"),
                       std::invalid_argument);
}

TEST_CASE("triangle inequality over generated scenes") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    SceneGraph s;
    s.scene_id = "tri";
    const int n = 2 + static_cast<int>(rng.below(8));
    for (int i = 0; i < n; ++i) {
      s.locations.push_back(
          testfx::loc("tri_l" + std::to_string(i), "spot", rng.uniform(-9, 9), rng.uniform(-9, 9)));
    }
    for (int k = 0; k < 30; ++k) {
      const auto& a = s.locations[rng.below(s.locations.size())].id;
      const auto& b = s.locations[rng.below(s.locations.size())].id;
      const auto& c = s.locations[rng.below(s.locations.size())].id;
      CHECK(distance(s, a, c) <= distance(s, a, b) + distance(s, b, c) + 1e-12);
    }
  }
}

TEST_CASE("candidates_of matches a brute-force scan and is deterministic") {
  SceneGraph s = testfx::colocated_scene();
  auto got = candidates_of(s, "bottle");
  std::vector<std::string> expect;
  for (const auto& o : s.objects) {
    if (o.category == "bottle") expect.push_back(o.id);
  }
  std::sort(expect.begin(), expect.end());
  CHECK(got == expect);
  CHECK(got.size() == 3);
  CHECK(candidates_of(s, "bottle") == got);  // identical ordering on repeat calls
  CHECK(candidates_of(s, "anvil").empty());
}

TEST_CASE("scene and task round-trip through their text form") {
  SceneGraph s = testfx::two_mug_scene();
  CHECK(scene_from_text(scene_to_text(s)) == s);

  Task t = testfx::two_mug_task();
  CHECK(task_from_text(task_to_text(t)) == t);
}

TEST_CASE("task validation catches structural violations") {
  SceneGraph s = testfx::two_mug_scene();
  Task t = testfx::two_mug_task();
  CHECK_NOTHROW(validate_task(t, s));

  SUBCASE("gt outside candidates") {
    t.gt_target_id = "fx2_l0";
    CHECK_THROWS_AS(validate_task(t, s), std::invalid_argument);
  }
  SUBCASE("candidate count below 2") {
    t.candidate_ids = {"fx2_oA"};
    CHECK_THROWS_AS(validate_task(t, s), std::invalid_argument);
  }
  SUBCASE("difficulty tag inconsistent") {
    t.difficulty = Difficulty::Hard;
    CHECK_THROWS_AS(validate_task(t, s), std::invalid_argument);
  }
  SUBCASE("unknown start location") {
    t.start_location_id = "elsewhere";
    CHECK_THROWS_AS(validate_task(t, s), std::invalid_argument);
  }
}

TEST_CASE("difficulty bins by candidate count") {
  CHECK(difficulty_for_candidate_count(2) == Difficulty::Easy);
  CHECK(difficulty_for_candidate_count(3) == Difficulty::Medium);
  CHECK(difficulty_for_candidate_count(4) == Difficulty::Hard);
  CHECK(difficulty_for_candidate_count(5) == Difficulty::Hard);
}

TEST_CASE("scene validation rejects duplicates and dangling references") {
  SceneGraph s = testfx::two_mug_scene();
  SUBCASE("duplicate location id") {
    s.locations.push_back(s.locations[0]);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }
  SUBCASE("object at unknown location") {
    s.objects[0].location_id = "void";
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }
  SUBCASE("unregistered attribute kind") {
    s.objects[0].attributes["smell"] = "odd";
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }
}

TEST_SUITE_END();
