#include "asknav/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "asknav/memory.hpp"
#include "json.hpp"

namespace asknav {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& category_vocabulary() {
  static const std::vector<std::string> v = {
      "mug",      "bottle",  "screwdriver", "wrench",   "hammer",  "notebook", "lamp",
      "plant",    "cushion", "toolbox",     "scissors", "stapler", "kettle",   "clipboard",
      "tape_roll", "brush",  "folder",      "charger",  "helmet",  "flashlight"};
  return v;
}

const std::vector<std::string>& withheld_category_set() {
  static const std::vector<std::string> v = {"charger", "helmet", "flashlight"};
  return v;
}

const std::vector<std::string>& color_values() {
  static const std::vector<std::string> v = {"red",   "blue",  "green",  "yellow",
                                             "black", "white", "orange", "purple"};
  return v;
}

const std::vector<std::string>& size_values() {
  static const std::vector<std::string> v = {"small", "medium", "large"};
  return v;
}

namespace {

const std::vector<std::string>& location_name_pool() {
  static const std::vector<std::string> v = {
      "workbench", "shelf",  "sink",   "table",  "cabinet", "desk",   "window", "doorway",
      "rack",      "bench",  "counter", "stool", "locker",  "pallet", "crate",  "toolwall"};
  return v;
}

std::string pad2(int n) {
  std::ostringstream ss;
  if (n < 10) ss << "0";
  ss << n;
  return ss.str();
}

std::string nearest_other_location_name(const SceneGraph& scene, const std::string& loc_id) {
  const Location& here = scene.location(loc_id);
  double best = std::numeric_limits<double>::infinity();
  std::string name;
  for (const auto& l : scene.locations) {
    if (l.id == loc_id) continue;
    const double dx = l.x - here.x;
    const double dy = l.y - here.y;
    const double d = std::sqrt(dx * dx + dy * dy);
    if (d < best) {
      best = d;
      name = l.name;
    }
  }
  return name;
}

// every member identifiable by at least one attribute kind on its own
bool cluster_uniquely_identifiable(const std::vector<AttrMap>& attrs) {
  for (size_t o = 0; o < attrs.size(); ++o) {
    bool has_unique_kind = false;
    for (int k = 0; k < kAttrKindCount && !has_unique_kind; ++k) {
      const std::string& kind = kAttrKinds[k];
      bool unique = true;
      for (size_t x = 0; x < attrs.size(); ++x) {
        if (x != o && attrs[x].at(kind) == attrs[o].at(kind)) {
          unique = false;
          break;
        }
      }
      has_unique_kind = unique;
    }
    if (!has_unique_kind) return false;
  }
  return true;
}

}  // namespace

void BenchConfig::validate() const {
  if (n_train_scenes < 1 || n_test_scenes < 1) {
    throw std::invalid_argument("bench config: need at least one scene per split");
  }
  if (min_locations < 6 || max_locations > 16 || min_locations > max_locations) {
    throw std::invalid_argument("bench config: locations range must lie within [6,16]");
  }
  if (candidate_count_weights.size() != 4) {
    throw std::invalid_argument("bench config: candidate_count_weights needs 4 entries (2..5)");
  }
  double sum = 0.0;
  for (double w : candidate_count_weights) {
    if (w < 0.0) throw std::invalid_argument("bench config: negative weight");
    sum += w;
  }
  if (sum <= 0.0) throw std::invalid_argument("bench config: weights sum to zero");
  if (unseen_category_fraction < 0.0 || unseen_category_fraction > 1.0) {
    throw std::invalid_argument("bench config: unseen_category_fraction outside [0,1]");
  }
  if (!(scene_diameter > 0.0)) throw std::invalid_argument("bench config: nonpositive diameter");
}

SceneGraph generate_scene(const BenchConfig& config, const std::string& scene_id,
                          const std::vector<ClusterPlan>& plans, bool allow_withheld,
                          uint64_t seed) {
  Rng rng(seed);
  SceneGraph scene;
  scene.scene_id = scene_id;
  scene.rng_seed = seed;

  const int n_loc = rng.uniform_int(config.min_locations, config.max_locations);
  std::vector<std::string> names = location_name_pool();
  std::shuffle(names.begin(), names.end(), rng.engine());
  for (int attempt = 0;; ++attempt) {
    scene.locations.clear();
    for (int i = 0; i < n_loc; ++i) {
      Location l;
      l.id = scene_id + "_l" + pad2(i);
      l.name = names[i];
      l.x = rng.uniform(0.0, config.scene_diameter);
      l.y = rng.uniform(0.0, config.scene_diameter);
      scene.locations.push_back(std::move(l));
    }
    bool ok = true;
    for (int a = 0; a < n_loc && ok; ++a) {
      for (int b = a + 1; b < n_loc && ok; ++b) {
        const double dx = scene.locations[a].x - scene.locations[b].x;
        const double dy = scene.locations[a].y - scene.locations[b].y;
        if (std::sqrt(dx * dx + dy * dy) < 0.2) ok = false;
      }
    }
    if (ok) break;
    if (attempt >= 100) throw std::runtime_error("generate_scene: could not place locations");
  }

  // pick distinct categories: planned clusters first, fillers after
  std::vector<std::string> seen_pool;
  for (const auto& c : category_vocabulary()) {
    const auto& withheld = withheld_category_set();
    if (std::find(withheld.begin(), withheld.end(), c) == withheld.end()) seen_pool.push_back(c);
  }
  std::vector<std::string> withheld_pool = withheld_category_set();
  std::shuffle(seen_pool.begin(), seen_pool.end(), rng.engine());
  std::shuffle(withheld_pool.begin(), withheld_pool.end(), rng.engine());
  size_t seen_next = 0, withheld_next = 0;
  auto take_category = [&](bool withheld) -> std::string {
    if (withheld) {
      if (!allow_withheld) throw std::logic_error("withheld category requested in train scene");
      if (withheld_next >= withheld_pool.size()) {
        throw std::runtime_error("generate_scene: withheld category pool exhausted");
      }
      return withheld_pool[withheld_next++];
    }
    if (seen_next >= seen_pool.size()) {
      throw std::runtime_error("generate_scene: category pool exhausted");
    }
    return seen_pool[seen_next++];
  };

  int obj_idx = 0;
  auto add_object = [&](const std::string& category, int loc_index, AttrMap attrs) {
    ObjectInstance obj;
    obj.id = scene_id + "_o" + pad2(obj_idx++);
    obj.category = category;
    obj.location_id = scene.locations[loc_index].id;
    attrs["nearest_landmark"] = nearest_other_location_name(scene, obj.location_id);
    obj.attributes = std::move(attrs);
    scene.objects.push_back(std::move(obj));
  };

  for (const auto& plan : plans) {
    if (plan.size < 2 || plan.size > 5) throw std::invalid_argument("cluster size outside [2,5]");
    const std::string category = take_category(plan.use_withheld_category);
    std::vector<int> loc_indices(scene.locations.size());
    std::iota(loc_indices.begin(), loc_indices.end(), 0);
    std::shuffle(loc_indices.begin(), loc_indices.end(), rng.engine());
    loc_indices.resize(plan.size);

    // nearest_landmark is fixed by placement; resample color/size until every
    // member carries a uniquely identifying kind
    std::vector<AttrMap> attrs;
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      attrs.clear();
      for (int m = 0; m < plan.size; ++m) {
        AttrMap a;
        a["color"] = color_values()[rng.below(color_values().size())];
        a["size"] = size_values()[rng.below(size_values().size())];
        a["nearest_landmark"] =
            nearest_other_location_name(scene, scene.locations[loc_indices[m]].id);
        attrs.push_back(std::move(a));
      }
      ok = cluster_uniquely_identifiable(attrs);
    }
    if (!ok) {
      throw std::runtime_error("generate_scene: attribute uniqueness unsatisfiable for " +
                               scene_id);
    }
    for (int m = 0; m < plan.size; ++m) {
      AttrMap a = attrs[m];
      a.erase("nearest_landmark");  // re-derived inside add_object
      add_object(category, loc_indices[m], std::move(a));
    }
  }

  const int n_filler = rng.uniform_int(config.min_filler_objects, config.max_filler_objects);
  for (int i = 0; i < n_filler && seen_next < seen_pool.size(); ++i) {
    AttrMap a;
    a["color"] = color_values()[rng.below(color_values().size())];
    a["size"] = size_values()[rng.below(size_values().size())];
    add_object(take_category(false), rng.uniform_int(0, n_loc - 1), std::move(a));
  }

  scene.validate();
  return scene;
}

Task inject_ambiguity(const SceneGraph& scene, int desired_count, const BenchConfig& config,
                      Rng& rng, const std::set<std::string>* category_filter) {
  // qualifying clusters, ordered by category for deterministic choice
  std::map<std::string, std::vector<std::string>> clusters;
  for (const auto& obj : scene.objects) clusters[obj.category].push_back(obj.id);
  std::vector<std::string> qualifying;
  for (const auto& [category, members] : clusters) {
    if (static_cast<int>(members.size()) != desired_count) continue;
    if (category_filter && !category_filter->count(category)) continue;
    qualifying.push_back(category);
  }
  if (qualifying.empty()) {
    throw std::runtime_error("inject_ambiguity: no cluster of size " +
                             std::to_string(desired_count) + " in " + scene.scene_id);
  }
  const std::string category = qualifying[rng.below(qualifying.size())];

  Task task;
  task.scene_id = scene.scene_id;
  task.category = category;
  task.instruction = "Find the " + category + ".";
  task.candidate_ids = candidates_of(scene, category);
  task.gt_target_id = task.candidate_ids[rng.below(task.candidate_ids.size())];
  task.difficulty = difficulty_for_candidate_count(desired_count);

  std::set<std::string> member_locations;
  for (const auto& id : task.candidate_ids) member_locations.insert(scene.object(id).location_id);
  std::vector<std::string> free_locations;
  for (const auto& l : scene.locations) {
    if (!member_locations.count(l.id)) free_locations.push_back(l.id);
  }
  if (free_locations.empty()) {
    throw std::runtime_error("inject_ambiguity: no candidate-free start location");
  }
  task.start_location_id = free_locations[rng.below(free_locations.size())];

  MemoryStore store = seed_memory(scene, config.p_cover, config.p_stale, rng);
  task.memory_seed = seed_entries_of(store, scene);
  return task;
}

namespace {

int sample_candidate_count(const BenchConfig& config, Rng& rng) {
  double sum = 0.0;
  for (double w : config.candidate_count_weights) sum += w;
  double u = rng.uniform01() * sum;
  for (int i = 0; i < 4; ++i) {
    u -= config.candidate_count_weights[i];
    if (u <= 0.0) return 2 + i;
  }
  return 5;
}

}  // namespace

Benchmark build_benchmark(const BenchConfig& config) {
  config.validate();
  Benchmark bench;
  bench.config = config;
  bench.withheld_categories = withheld_category_set();

  int global_task = 0;
  auto make_task = [&](const SceneGraph& scene, const ClusterPlan& plan, bool is_train) {
    Rng task_rng(derive_seed(config.master_seed, 0x7A5BULL, global_task));
    std::set<std::string> filter;
    if (plan.use_withheld_category) {
      filter.insert(withheld_category_set().begin(), withheld_category_set().end());
    } else {
      for (const auto& c : category_vocabulary()) {
        const auto& withheld = withheld_category_set();
        if (std::find(withheld.begin(), withheld.end(), c) == withheld.end()) filter.insert(c);
      }
    }
    Task task = inject_ambiguity(scene, plan.size, config, task_rng, &filter);
    task.task_id = (is_train ? "task_tr" : "task_te") + std::to_string(global_task);
    ++global_task;
    return task;
  };

  for (int s = 0; s < config.n_train_scenes; ++s) {
    const std::string id = "scene_tr" + pad2(s);
    Rng plan_rng(derive_seed(config.master_seed, 0x5CE7ULL, s));
    std::vector<ClusterPlan> plans;
    for (int t = 0; t < config.train_tasks_per_scene; ++t) {
      plans.push_back(ClusterPlan{sample_candidate_count(config, plan_rng), false});
    }
    SceneGraph scene =
        generate_scene(config, id, plans, false, derive_seed(config.master_seed, 0x10ULL, s));
    for (const auto& plan : plans) bench.train_tasks.push_back(make_task(scene, plan, true));
    bench.train_scene_ids.push_back(id);
    bench.scenes[id] = std::move(scene);
  }

  // distribute test tasks round-robin over test scenes; the first
  // `n_unseen` slots use withheld categories
  const int n_unseen =
      static_cast<int>(std::lround(config.unseen_category_fraction * config.n_test_tasks));
  std::vector<std::vector<ClusterPlan>> test_plans(config.n_test_scenes);
  {
    Rng plan_rng(derive_seed(config.master_seed, 0x7E57ULL));
    for (int t = 0; t < config.n_test_tasks; ++t) {
      ClusterPlan plan;
      plan.size = sample_candidate_count(config, plan_rng);
      plan.use_withheld_category = t < n_unseen;
      test_plans[t % config.n_test_scenes].push_back(plan);
    }
  }
  for (int s = 0; s < config.n_test_scenes; ++s) {
    const std::string id = "scene_te" + pad2(s);
    SceneGraph scene = generate_scene(config, id, test_plans[s], true,
                                      derive_seed(config.master_seed, 0x20ULL, s));
    for (const auto& plan : test_plans[s]) bench.test_tasks.push_back(make_task(scene, plan, false));
    bench.test_scene_ids.push_back(id);
    bench.scenes[id] = std::move(scene);
  }

  for (const auto& t : bench.train_tasks) validate_task(t, bench.scenes.at(t.scene_id));
  for (const auto& t : bench.test_tasks) validate_task(t, bench.scenes.at(t.scene_id));
  return bench;
}

namespace {

json config_to_json(const BenchConfig& c) {
  return json{{"n_train_scenes", c.n_train_scenes},
              {"n_test_scenes", c.n_test_scenes},
              {"train_tasks_per_scene", c.train_tasks_per_scene},
              {"n_test_tasks", c.n_test_tasks},
              {"min_locations", c.min_locations},
              {"max_locations", c.max_locations},
              {"min_filler_objects", c.min_filler_objects},
              {"max_filler_objects", c.max_filler_objects},
              {"candidate_count_weights", c.candidate_count_weights},
              {"unseen_category_fraction", c.unseen_category_fraction},
              {"scene_diameter", c.scene_diameter},
              {"p_cover", c.p_cover},
              {"p_stale", c.p_stale},
              {"master_seed", c.master_seed}};
}

BenchConfig config_from_json(const json& j) {
  BenchConfig c;
  c.n_train_scenes = j.at("n_train_scenes").get<int>();
  c.n_test_scenes = j.at("n_test_scenes").get<int>();
  c.train_tasks_per_scene = j.at("train_tasks_per_scene").get<int>();
  c.n_test_tasks = j.at("n_test_tasks").get<int>();
  c.min_locations = j.at("min_locations").get<int>();
  c.max_locations = j.at("max_locations").get<int>();
  c.min_filler_objects = j.at("min_filler_objects").get<int>();
  c.max_filler_objects = j.at("max_filler_objects").get<int>();
  c.candidate_count_weights = j.at("candidate_count_weights").get<std::vector<double>>();
  c.unseen_category_fraction = j.at("unseen_category_fraction").get<double>();
  c.scene_diameter = j.at("scene_diameter").get<double>();
  c.p_cover = j.at("p_cover").get<double>();
  c.p_stale = j.at("p_stale").get<double>();
  c.master_seed = j.at("master_seed").get<uint64_t>();
  return c;
}

}  // namespace

void save_benchmark(const Benchmark& bench, const std::string& dir) {
  fs::create_directories(fs::path(dir) / "scenes");
  fs::create_directories(fs::path(dir) / "tasks");

  json manifest;
  manifest["format_version"] = 1;
  manifest["config"] = config_to_json(bench.config);
  manifest["withheld_categories"] = bench.withheld_categories;
  manifest["train_scene_ids"] = bench.train_scene_ids;
  manifest["test_scene_ids"] = bench.test_scene_ids;

  std::map<std::string, int> difficulty_histogram;
  json train_ids = json::array(), test_ids = json::array();
  for (const auto& t : bench.train_tasks) {
    train_ids.push_back(t.task_id);
    difficulty_histogram[to_string(t.difficulty)]++;
  }
  for (const auto& t : bench.test_tasks) {
    test_ids.push_back(t.task_id);
    difficulty_histogram[to_string(t.difficulty)]++;
  }
  manifest["train_task_ids"] = train_ids;
  manifest["test_task_ids"] = test_ids;
  manifest["difficulty_histogram"] = difficulty_histogram;

  std::ofstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw std::runtime_error("cannot write manifest in " + dir);
  mf << manifest.dump(2) << "\n";

  for (const auto& [id, scene] : bench.scenes) {
    save_scene(scene, (fs::path(dir) / "scenes" / (id + ".json")).string());
  }
  for (const auto& t : bench.train_tasks) {
    save_task(t, (fs::path(dir) / "tasks" / (t.task_id + ".json")).string());
  }
  for (const auto& t : bench.test_tasks) {
    save_task(t, (fs::path(dir) / "tasks" / (t.task_id + ".json")).string());
  }
}

Benchmark load_benchmark(const std::string& dir) {
  std::ifstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw std::runtime_error("no benchmark manifest at " + dir + " (run `asknav gen` first)");
  json manifest = json::parse(mf);
  if (manifest.at("format_version").get<int>() != 1) {
    throw std::runtime_error("unsupported benchmark manifest version");
  }

  Benchmark bench;
  bench.config = config_from_json(manifest.at("config"));
  bench.withheld_categories = manifest.at("withheld_categories").get<std::vector<std::string>>();
  bench.train_scene_ids = manifest.at("train_scene_ids").get<std::vector<std::string>>();
  bench.test_scene_ids = manifest.at("test_scene_ids").get<std::vector<std::string>>();

  for (const auto& id : bench.train_scene_ids) {
    bench.scenes[id] = load_scene((fs::path(dir) / "scenes" / (id + ".json")).string());
  }
  for (const auto& id : bench.test_scene_ids) {
    bench.scenes[id] = load_scene((fs::path(dir) / "scenes" / (id + ".json")).string());
  }
  for (const auto& idj : manifest.at("train_task_ids")) {
    bench.train_tasks.push_back(
        load_task((fs::path(dir) / "tasks" / (idj.get<std::string>() + ".json")).string()));
  }
  for (const auto& idj : manifest.at("test_task_ids")) {
    bench.test_tasks.push_back(
        load_task((fs::path(dir) / "tasks" / (idj.get<std::string>() + ".json")).string()));
  }
  return bench;
}

}  // namespace asknav
