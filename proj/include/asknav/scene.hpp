#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace asknav {

// Fixed attribute registry. Every object carries exactly these three kinds;
// "nearest_landmark" holds the name of the nearest *other* location.
inline constexpr int kAttrKindCount = 3;
inline constexpr std::array<const char*, kAttrKindCount> kAttrKinds = {
    "color", "size", "nearest_landmark"};

int attr_kind_index(const std::string& kind);  // -1 if unknown
bool is_attr_kind(const std::string& kind);

using AttrMap = std::map<std::string, std::string>;

struct Location {
  std::string id;
  std::string name;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Location&) const = default;
};

struct ObjectInstance {
  std::string id;
  std::string category;
  AttrMap attributes;
  std::string location_id;

  bool operator==(const ObjectInstance&) const = default;
};

struct SceneGraph {
  std::string scene_id;
  std::vector<Location> locations;
  std::vector<ObjectInstance> objects;
  uint64_t rng_seed = 0;

  bool operator==(const SceneGraph&) const = default;

  const Location& location(const std::string& id) const;
  const ObjectInstance& object(const std::string& id) const;
  bool has_location(const std::string& id) const;
  bool has_object(const std::string& id) const;

  // Largest pairwise location distance; used to normalize distance features.
  double diameter() const;

  void validate() const;  // throws std::invalid_argument on violation
};

enum class Difficulty { Easy, Medium, Hard };

Difficulty difficulty_for_candidate_count(int n);
std::string to_string(Difficulty d);
Difficulty difficulty_from_string(const std::string& s);

struct MemorySeedEntry {
  std::string object_id;
  std::string recorded_location_id;
  bool is_stale = false;

  bool operator==(const MemorySeedEntry&) const = default;
};

struct Task {
  std::string task_id;
  std::string scene_id;
  std::string instruction;
  std::string category;  // the coarse category named by the instruction
  std::vector<std::string> candidate_ids;
  std::string gt_target_id;
  std::string start_location_id;
  Difficulty difficulty = Difficulty::Easy;
  std::vector<MemorySeedEntry> memory_seed;

  bool operator==(const Task&) const = default;
};

// Euclidean distance between two locations of the scene.
double distance(const SceneGraph& scene, const std::string& a, const std::string& b);

// All object ids whose category matches, sorted by id.
std::vector<std::string> candidates_of(const SceneGraph& scene, const std::string& category);

// Cross-checks a task against its scene: ids resolve, candidate count in
// [2,5], gt is a candidate, difficulty tag matches the count.
void validate_task(const Task& task, const SceneGraph& scene);

// Structured-text persistence (format_version 1).
std::string scene_to_text(const SceneGraph& scene);
SceneGraph scene_from_text(const std::string& text);
std::string task_to_text(const Task& task);
Task task_from_text(const std::string& text);

void save_scene(const SceneGraph& scene, const std::string& path);
SceneGraph load_scene(const std::string& path);
void save_task(const Task& task, const std::string& path);
Task load_task(const std::string& path);

}  // namespace asknav
