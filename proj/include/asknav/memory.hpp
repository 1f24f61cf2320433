#pragma once

#include <map>
#include <string>
#include <vector>

#include "asknav/rng.hpp"
#include "asknav/scene.hpp"

namespace asknav {

enum class FactSource { Seed, Observed };

struct MemoryFact {
  std::string object_id;
  std::string category;
  AttrMap attributes;  // snapshot; accurate even when the recorded location is not
  std::string recorded_location_id;
  bool stale = false;  // recorded location differs from the true one; Seed facts only
  FactSource source = FactSource::Seed;

  bool operator==(const MemoryFact&) const = default;
};

// Episodic memory keyed by object id. Observed facts overwrite Seed facts;
// there is never more than one fact per object.
class MemoryStore {
 public:
  MemoryStore() = default;

  void upsert(MemoryFact fact);
  bool contains(const std::string& object_id) const;
  const MemoryFact* find(const std::string& object_id) const;
  void erase(const std::string& object_id);

  // All facts matching a category or an exact object id, sorted by object_id.
  std::vector<MemoryFact> retrieve(const std::string& key) const;

  size_t size() const { return facts_.size(); }
  double coverage(size_t n_scene_objects) const;

  const std::map<std::string, MemoryFact>& facts() const { return facts_; }

 private:
  std::map<std::string, MemoryFact> facts_;
};

// Pre-seeded prior knowledge: each scene object is included independently
// with probability p_cover; included facts are stale with probability p_stale
// (recorded location resampled uniformly from the other locations).
MemoryStore seed_memory(const SceneGraph& scene, double p_cover, double p_stale, Rng& rng);

// Reconstructs a store from a task's persisted seed list. Attribute
// snapshots always come from the scene; only the recorded location can lie.
MemoryStore store_from_seed(const SceneGraph& scene, const std::vector<MemorySeedEntry>& seed);

// Converts a freshly seeded store back to the persistable seed list.
std::vector<MemorySeedEntry> seed_entries_of(const MemoryStore& store, const SceneGraph& scene);

// Upserts everything seen at a location with source=Observed.
void write_observation(MemoryStore& store, const SceneGraph& scene,
                       const std::string& location_id,
                       const std::vector<std::string>& observed_object_ids);

}  // namespace asknav
