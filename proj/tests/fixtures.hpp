#pragma once

#include <string>
#include <vector>

#include "asknav/benchgen.hpp"
#include "asknav/scene.hpp"

namespace asknav::testfx {

inline Location loc(std::string id, std::string name, double x, double y) {
  Location l;
  l.id = std::move(id);
  l.name = std::move(name);
  l.x = x;
  l.y = y;
  return l;
}

inline ObjectInstance obj(std::string id, std::string category, std::string loc_id,
                          std::string color, std::string size, std::string landmark) {
  ObjectInstance o;
  o.id = std::move(id);
  o.category = std::move(category);
  o.location_id = std::move(loc_id);
  o.attributes["color"] = std::move(color);
  o.attributes["size"] = std::move(size);
  o.attributes["nearest_landmark"] = std::move(landmark);
  return o;
}

// Start at the origin; two mugs 5m away on opposite sides (10m apart),
// differing in color. Memory seed covers both accurately unless trimmed.
inline SceneGraph two_mug_scene() {
  SceneGraph s;
  s.scene_id = "fx2";
  s.locations = {loc("fx2_l0", "doorway", 0.0, 0.0), loc("fx2_l1", "workbench", -5.0, 0.0),
                 loc("fx2_l2", "shelf", 5.0, 0.0)};
  s.objects = {obj("fx2_oA", "mug", "fx2_l1", "red", "small", "doorway"),
               obj("fx2_oB", "mug", "fx2_l2", "blue", "small", "doorway")};
  s.validate();
  return s;
}

inline Task two_mug_task(bool cover_a = true, bool cover_b = true,
                         const std::string& gt = "fx2_oA") {
  Task t;
  t.task_id = "fx2_t0";
  t.scene_id = "fx2";
  t.category = "mug";
  t.instruction = "Find the mug.";
  t.candidate_ids = {"fx2_oA", "fx2_oB"};
  t.gt_target_id = gt;
  t.start_location_id = "fx2_l0";
  t.difficulty = Difficulty::Easy;
  if (cover_a) t.memory_seed.push_back({"fx2_oA", "fx2_l1", false});
  if (cover_b) t.memory_seed.push_back({"fx2_oB", "fx2_l2", false});
  return t;
}

// Three candidates sharing the start location (attributes visible from the
// first observation), convenient for pruning fixtures.
inline SceneGraph colocated_scene() {
  SceneGraph s;
  s.scene_id = "fx3";
  s.locations = {loc("fx3_l0", "table", 0.0, 0.0), loc("fx3_l1", "sink", 3.0, 4.0),
                 loc("fx3_l2", "rack", 1.0, 1.0)};
  s.objects = {obj("fx3_o0", "bottle", "fx3_l0", "red", "small", "rack"),
               obj("fx3_o1", "bottle", "fx3_l0", "blue", "medium", "rack"),
               obj("fx3_o2", "bottle", "fx3_l0", "green", "large", "rack"),
               obj("fx3_o3", "lamp", "fx3_l1", "white", "small", "table")};
  s.validate();
  return s;
}

inline Task colocated_task(const std::string& gt = "fx3_o0") {
  Task t;
  t.task_id = "fx3_t0";
  t.scene_id = "fx3";
  t.category = "bottle";
  t.instruction = "Find the bottle.";
  t.candidate_ids = {"fx3_o0", "fx3_o1", "fx3_o2"};
  t.gt_target_id = gt;
  t.start_location_id = "fx3_l0";
  t.difficulty = Difficulty::Medium;
  return t;
}

// Small random benchmark for property tests.
inline Benchmark tiny_benchmark(uint64_t seed = 7, int train_scenes = 3, int test_scenes = 2,
                                int tasks_per_scene = 3, int test_tasks = 6) {
  BenchConfig cfg;
  cfg.n_train_scenes = train_scenes;
  cfg.n_test_scenes = test_scenes;
  cfg.train_tasks_per_scene = tasks_per_scene;
  cfg.n_test_tasks = test_tasks;
  cfg.master_seed = seed;
  return build_benchmark(cfg);
}

}  // namespace asknav::testfx
