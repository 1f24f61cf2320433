#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asknav/rng.hpp"
#include "asknav/scene.hpp"

namespace asknav {

struct BenchConfig {
  int n_train_scenes = 40;
  int n_test_scenes = 15;
  int train_tasks_per_scene = 10;
  int n_test_tasks = 200;
  int min_locations = 10;
  int max_locations = 16;
  int min_filler_objects = 3;
  int max_filler_objects = 6;
  // candidate-count distribution over {2,3,4,5}
  std::vector<double> candidate_count_weights = {0.35, 0.30, 0.20, 0.15};
  double unseen_category_fraction = 0.15;
  double scene_diameter = 3.5;
  double p_cover = 0.6;
  double p_stale = 0.15;
  uint64_t master_seed = 42;

  void validate() const;
};

// Cluster plan for a single scene: one entry per ambiguity cluster to embed.
struct ClusterPlan {
  int size = 2;
  bool use_withheld_category = false;
};

// Procedurally places locations and objects so that every planned cluster
// exists and every cluster member is uniquely identified by at least one
// attribute kind.
SceneGraph generate_scene(const BenchConfig& config, const std::string& scene_id,
                          const std::vector<ClusterPlan>& plans, bool allow_withheld,
                          uint64_t seed);

// Builds an ambiguous task over an existing cluster of the desired size.
// category_filter restricts the qualifying clusters when present.
Task inject_ambiguity(const SceneGraph& scene, int desired_count, const BenchConfig& config,
                      Rng& rng, const std::set<std::string>* category_filter = nullptr);

struct Benchmark {
  std::map<std::string, SceneGraph> scenes;
  std::vector<Task> train_tasks;
  std::vector<Task> test_tasks;
  std::vector<std::string> train_scene_ids;
  std::vector<std::string> test_scene_ids;
  std::vector<std::string> withheld_categories;
  BenchConfig config;
};

Benchmark build_benchmark(const BenchConfig& config);

// Directory layout: manifest.json + scenes/*.json + tasks/*.json.
void save_benchmark(const Benchmark& bench, const std::string& dir);
Benchmark load_benchmark(const std::string& dir);

const std::vector<std::string>& category_vocabulary();
const std::vector<std::string>& withheld_category_set();
const std::vector<std::string>& color_values();
const std::vector<std::string>& size_values();

}  // namespace asknav
