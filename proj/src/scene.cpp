#include "asknav/scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace asknav {

using nlohmann::json;

int attr_kind_index(const std::string& kind) {
  for (int i = 0; i < kAttrKindCount; ++i) {
    if (kind == kAttrKinds[i]) return i;
  }
  return -1;
}

bool is_attr_kind(const std::string& kind) { return attr_kind_index(kind) >= 0; }

const Location& SceneGraph::location(const std::string& id) const {
  for (const auto& l : locations) {
    if (l.id == id) return l;
  }
  throw std::invalid_argument("unknown location id: " + id);
}

const ObjectInstance& SceneGraph::object(const std::string& id) const {
  for (const auto& o : objects) {
    if (o.id == id) return o;
  }
  throw std::invalid_argument("unknown object id: " + id);
}

bool SceneGraph::has_location(const std::string& id) const {
  for (const auto& l : locations) {
    if (l.id == id) return true;
  }
  return false;
}

bool SceneGraph::has_object(const std::string& id) const {
  for (const auto& o : objects) {
    if (o.id == id) return true;
  }
  return false;
}

double SceneGraph::diameter() const {
  double best = 0.0;
  for (size_t i = 0; i < locations.size(); ++i) {
    for (size_t j = i + 1; j < locations.size(); ++j) {
      const double dx = locations[i].x - locations[j].x;
      const double dy = locations[i].y - locations[j].y;
      best = std::max(best, std::sqrt(dx * dx + dy * dy));
    }
  }
  return best;
}

void SceneGraph::validate() const {
  if (locations.size() < 2) {
    throw std::invalid_argument("scene " + scene_id + ": needs at least 2 locations");
  }
  std::map<std::string, int> seen;
  for (const auto& l : locations) {
    if (++seen[l.id] > 1) throw std::invalid_argument("duplicate location id: " + l.id);
    if (!std::isfinite(l.x) || !std::isfinite(l.y)) {
      throw std::invalid_argument("non-finite coords for location " + l.id);
    }
  }
  std::map<std::string, int> seen_obj;
  for (const auto& o : objects) {
    if (++seen_obj[o.id] > 1) throw std::invalid_argument("duplicate object id: " + o.id);
    if (o.category.empty()) throw std::invalid_argument("empty category for object " + o.id);
    if (!has_location(o.location_id)) {
      throw std::invalid_argument("object " + o.id + " references unknown location " + o.location_id);
    }
    for (const auto& [k, v] : o.attributes) {
      if (!is_attr_kind(k)) {
        throw std::invalid_argument("object " + o.id + " has unregistered attribute kind " + k);
      }
    }
  }
}

Difficulty difficulty_for_candidate_count(int n) {
  if (n <= 2) return Difficulty::Easy;
  if (n == 3) return Difficulty::Medium;
  return Difficulty::Hard;
}

std::string to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Medium: return "medium";
    case Difficulty::Hard: return "hard";
  }
  return "easy";
}

Difficulty difficulty_from_string(const std::string& s) {
  if (s == "easy") return Difficulty::Easy;
  if (s == "medium") return Difficulty::Medium;
  if (s == "hard") return Difficulty::Hard;
  throw std::invalid_argument("unknown difficulty: " + s);
}

double distance(const SceneGraph& scene, const std::string& a, const std::string& b) {
  const Location& la = scene.location(a);
  const Location& lb = scene.location(b);
  const double dx = la.x - lb.x;
  const double dy = la.y - lb.y;
  return std::sqrt(dx * dx + dy * dy);
}

std::vector<std::string> candidates_of(const SceneGraph& scene, const std::string& category) {
  std::vector<std::string> out;
  for (const auto& o : scene.objects) {
    if (o.category == category) out.push_back(o.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void validate_task(const Task& task, const SceneGraph& scene) {
  if (task.scene_id != scene.scene_id) {
    throw std::invalid_argument("task " + task.task_id + " references scene " + task.scene_id +
                                " but got " + scene.scene_id);
  }
  const size_t n = task.candidate_ids.size();
  if (n < 2 || n > 5) {
    throw std::invalid_argument("task " + task.task_id + ": candidate count " +
                                std::to_string(n) + " outside [2,5]");
  }
  bool gt_found = false;
  for (const auto& id : task.candidate_ids) {
    if (!scene.has_object(id)) {
      throw std::invalid_argument("task " + task.task_id + ": unknown candidate " + id);
    }
    if (scene.object(id).category != task.category) {
      throw std::invalid_argument("task " + task.task_id + ": candidate " + id +
                                  " has category mismatch");
    }
    if (id == task.gt_target_id) gt_found = true;
  }
  if (!gt_found) {
    throw std::invalid_argument("task " + task.task_id + ": gt_target not among candidates");
  }
  if (!scene.has_location(task.start_location_id)) {
    throw std::invalid_argument("task " + task.task_id + ": unknown start location " +
                                task.start_location_id);
  }
  if (task.difficulty != difficulty_for_candidate_count(static_cast<int>(n))) {
    throw std::invalid_argument("task " + task.task_id + ": difficulty tag inconsistent with count");
  }
  for (const auto& e : task.memory_seed) {
    if (!scene.has_object(e.object_id)) {
      throw std::invalid_argument("task " + task.task_id + ": memory seed for unknown object " +
                                  e.object_id);
    }
    if (!scene.has_location(e.recorded_location_id)) {
      throw std::invalid_argument("task " + task.task_id + ": memory seed records unknown location " +
                                  e.recorded_location_id);
    }
  }
}

namespace {

json location_to_json(const Location& l) {
  return json{{"id", l.id}, {"name", l.name}, {"x", l.x}, {"y", l.y}};
}

Location location_from_json(const json& j) {
  Location l;
  l.id = j.at("id").get<std::string>();
  l.name = j.at("name").get<std::string>();
  l.x = j.at("x").get<double>();
  l.y = j.at("y").get<double>();
  return l;
}

json object_to_json(const ObjectInstance& o) {
  return json{{"id", o.id},
              {"category", o.category},
              {"attributes", o.attributes},
              {"location_id", o.location_id}};
}

ObjectInstance object_from_json(const json& j) {
  ObjectInstance o;
  o.id = j.at("id").get<std::string>();
  o.category = j.at("category").get<std::string>();
  o.attributes = j.at("attributes").get<AttrMap>();
  o.location_id = j.at("location_id").get<std::string>();
  return o;
}

void check_format_version(const json& j, const char* what) {
  if (!j.contains("format_version") || j.at("format_version").get<int>() != 1) {
    throw std::invalid_argument(std::string(what) + ": unsupported format_version");
  }
}

}  // namespace

std::string scene_to_text(const SceneGraph& scene) {
  json j;
  j["format_version"] = 1;
  j["scene_id"] = scene.scene_id;
  j["rng_seed"] = scene.rng_seed;
  j["locations"] = json::array();
  for (const auto& l : scene.locations) j["locations"].push_back(location_to_json(l));
  j["objects"] = json::array();
  for (const auto& o : scene.objects) j["objects"].push_back(object_to_json(o));
  return j.dump(2) + "\n";
}

SceneGraph scene_from_text(const std::string& text) {
  json j = json::parse(text);
  check_format_version(j, "scene");
  SceneGraph s;
  s.scene_id = j.at("scene_id").get<std::string>();
  s.rng_seed = j.at("rng_seed").get<uint64_t>();
  for (const auto& lj : j.at("locations")) s.locations.push_back(location_from_json(lj));
  for (const auto& oj : j.at("objects")) s.objects.push_back(object_from_json(oj));
  s.validate();
  return s;
}

std::string task_to_text(const Task& task) {
  json j;
  j["format_version"] = 1;
  j["task_id"] = task.task_id;
  j["scene_id"] = task.scene_id;
  j["instruction"] = task.instruction;
  j["category"] = task.category;
  j["candidate_ids"] = task.candidate_ids;
  j["gt_target_id"] = task.gt_target_id;
  j["start_location_id"] = task.start_location_id;
  j["difficulty"] = to_string(task.difficulty);
  j["memory_seed"] = json::array();
  for (const auto& e : task.memory_seed) {
    j["memory_seed"].push_back(json{{"object_id", e.object_id},
                                    {"recorded_location_id", e.recorded_location_id},
                                    {"is_stale", e.is_stale}});
  }
  return j.dump(2) + "\n";
}

Task task_from_text(const std::string& text) {
  json j = json::parse(text);
  check_format_version(j, "task");
  Task t;
  t.task_id = j.at("task_id").get<std::string>();
  t.scene_id = j.at("scene_id").get<std::string>();
  t.instruction = j.at("instruction").get<std::string>();
  t.category = j.at("category").get<std::string>();
  t.candidate_ids = j.at("candidate_ids").get<std::vector<std::string>>();
  t.gt_target_id = j.at("gt_target_id").get<std::string>();
  t.start_location_id = j.at("start_location_id").get<std::string>();
  t.difficulty = difficulty_from_string(j.at("difficulty").get<std::string>());
  for (const auto& ej : j.at("memory_seed")) {
    MemorySeedEntry e;
    e.object_id = ej.at("object_id").get<std::string>();
    e.recorded_location_id = ej.at("recorded_location_id").get<std::string>();
    e.is_stale = ej.at("is_stale").get<bool>();
    t.memory_seed.push_back(e);
  }
  return t;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace

void save_scene(const SceneGraph& scene, const std::string& path) {
  write_file(path, scene_to_text(scene));
}

SceneGraph load_scene(const std::string& path) { return scene_from_text(read_file(path)); }

void save_task(const Task& task, const std::string& path) {
  write_file(path, task_to_text(task));
}

Task load_task(const std::string& path) { return task_from_text(read_file(path)); }

}  // namespace asknav
