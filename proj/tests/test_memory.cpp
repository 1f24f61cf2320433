#include "asknav/memory.hpp"

#include "doctest.h"
#include "fixtures.hpp"

using namespace asknav;

TEST_SUITE_BEGIN("memory");

TEST_CASE("full coverage without staleness records every object accurately") {
  SceneGraph s = testfx::colocated_scene();
  Rng rng(5);
  MemoryStore store = seed_memory(s, 1.0, 0.0, rng);
  CHECK(store.size() == s.objects.size());
  for (const auto& o : s.objects) {
    const MemoryFact* f = store.find(o.id);
    REQUIRE(f != nullptr);
    CHECK(f->recorded_location_id == o.location_id);
    CHECK_FALSE(f->stale);
    CHECK(f->attributes == o.attributes);
    CHECK(f->source == FactSource::Seed);
  }
}

TEST_CASE("zero coverage yields an empty store") {
  SceneGraph s = testfx::colocated_scene();
  Rng rng(5);
  CHECK(seed_memory(s, 0.0, 0.5, rng).size() == 0);
}

TEST_CASE("seeding is reproducible for a fixed seed") {
  SceneGraph s = testfx::tiny_benchmark(3).scenes.begin()->second;
  Rng a(42), b(42);
  MemoryStore sa = seed_memory(s, 0.6, 0.3, a);
  MemoryStore sb = seed_memory(s, 0.6, 0.3, b);
  CHECK(sa.facts() == sb.facts());
}

TEST_CASE("stale facts record a different location and keep true attributes") {
  SceneGraph s = testfx::tiny_benchmark(9).scenes.begin()->second;
  Rng rng(8);
  MemoryStore store = seed_memory(s, 1.0, 1.0, rng);
  for (const auto& [id, f] : store.facts()) {
    CHECK(f.stale);
    CHECK(f.recorded_location_id != s.object(id).location_id);
    CHECK(f.attributes == s.object(id).attributes);
  }
}

TEST_CASE("probabilistic coverage lands near p_cover") {
  SceneGraph s = testfx::tiny_benchmark(11, 4, 1, 4, 4).scenes.begin()->second;
  Rng rng(17);
  int covered = 0, trials = 200;
  for (int i = 0; i < trials; ++i) {
    covered += static_cast<int>(seed_memory(s, 0.6, 0.15, rng).size());
  }
  const double rate = static_cast<double>(covered) / (trials * s.objects.size());
  CHECK(rate == doctest::Approx(0.6).epsilon(0.1));
}

TEST_CASE("observation writes correct stale records and grow the store") {
  SceneGraph s = testfx::two_mug_scene();
  MemoryStore store;
  MemoryFact stale;
  stale.object_id = "fx2_oA";
  stale.category = "mug";
  stale.attributes = s.object("fx2_oA").attributes;
  stale.recorded_location_id = "fx2_l2";  // actually at l1
  stale.stale = true;
  store.upsert(stale);

  write_observation(store, s, "fx2_l1", {"fx2_oA"});
  const MemoryFact* f = store.find("fx2_oA");
  REQUIRE(f != nullptr);
  CHECK(f->source == FactSource::Observed);
  CHECK(f->recorded_location_id == "fx2_l1");
  CHECK_FALSE(f->stale);

  write_observation(store, s, "fx2_l2", {"fx2_oB"});
  CHECK(store.size() == 2);

  // idempotent on an identical repeat
  const auto before = store.facts();
  write_observation(store, s, "fx2_l2", {"fx2_oB"});
  CHECK(store.facts() == before);
}

TEST_CASE("observed facts outrank later seed writes") {
  SceneGraph s = testfx::two_mug_scene();
  MemoryStore store;
  write_observation(store, s, "fx2_l1", {"fx2_oA"});
  MemoryFact seed;
  seed.object_id = "fx2_oA";
  seed.category = "mug";
  seed.attributes = s.object("fx2_oA").attributes;
  seed.recorded_location_id = "fx2_l2";
  seed.stale = true;
  seed.source = FactSource::Seed;
  store.upsert(seed);
  CHECK(store.find("fx2_oA")->source == FactSource::Observed);
}

TEST_CASE("observed facts are never stale") {
  MemoryFact f;
  f.object_id = "x";
  f.source = FactSource::Observed;
  f.stale = true;
  MemoryStore store;
  CHECK_THROWS_AS(store.upsert(f), std::invalid_argument);
}

TEST_CASE("retrieve filters by category or object id, sorted, without mutation") {
  SceneGraph s = testfx::colocated_scene();
  Rng rng(2);
  MemoryStore store = seed_memory(s, 1.0, 0.0, rng);
  const auto before = store.facts();

  auto bottles = store.retrieve("bottle");
  CHECK(bottles.size() == 3);
  for (size_t i = 1; i < bottles.size(); ++i) CHECK(bottles[i - 1].object_id < bottles[i].object_id);

  auto one = store.retrieve("fx3_o1");
  REQUIRE(one.size() == 1);
  CHECK(one[0].object_id == "fx3_o1");

  CHECK(store.retrieve("anvil").empty());
  CHECK(store.facts() == before);
}

TEST_CASE("store never holds more facts than the scene has objects") {
  SceneGraph s = testfx::colocated_scene();
  Rng rng(4);
  MemoryStore store = seed_memory(s, 1.0, 0.5, rng);
  std::vector<std::string> all;
  for (const auto& o : s.objects) all.push_back(o.id);
  for (const auto& l : s.locations) {
    std::vector<std::string> here;
    for (const auto& o : s.objects) {
      if (o.location_id == l.id) here.push_back(o.id);
    }
    write_observation(store, s, l.id, here);
    CHECK(store.size() <= s.objects.size());
  }
  // after visiting everything, the store agrees with the ground truth
  for (const auto& o : s.objects) {
    const MemoryFact* f = store.find(o.id);
    REQUIRE(f != nullptr);
    CHECK(f->recorded_location_id == o.location_id);
    CHECK_FALSE(f->stale);
  }
}

TEST_CASE("store round-trips through the task seed list") {
  SceneGraph s = testfx::two_mug_scene();
  Rng rng(77);
  MemoryStore store = seed_memory(s, 1.0, 0.5, rng);
  auto entries = seed_entries_of(store, s);
  MemoryStore back = store_from_seed(s, entries);
  CHECK(back.facts() == store.facts());
}

TEST_SUITE_END();
