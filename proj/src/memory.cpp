#include "asknav/memory.hpp"

#include <algorithm>
#include <stdexcept>

namespace asknav {

void MemoryStore::upsert(MemoryFact fact) {
  if (fact.source == FactSource::Observed && fact.stale) {
    throw std::invalid_argument("observed facts are never stale");
  }
  auto it = facts_.find(fact.object_id);
  if (it != facts_.end() && it->second.source == FactSource::Observed &&
      fact.source == FactSource::Seed) {
    return;  // observations outrank seeds
  }
  facts_[fact.object_id] = std::move(fact);
}

bool MemoryStore::contains(const std::string& object_id) const {
  return facts_.count(object_id) > 0;
}

const MemoryFact* MemoryStore::find(const std::string& object_id) const {
  auto it = facts_.find(object_id);
  return it == facts_.end() ? nullptr : &it->second;
}

void MemoryStore::erase(const std::string& object_id) { facts_.erase(object_id); }

std::vector<MemoryFact> MemoryStore::retrieve(const std::string& key) const {
  std::vector<MemoryFact> out;
  for (const auto& [id, fact] : facts_) {
    if (fact.category == key || id == key) out.push_back(fact);
  }
  // facts_ is id-ordered already; keep the guarantee explicit
  std::sort(out.begin(), out.end(),
            [](const MemoryFact& a, const MemoryFact& b) { return a.object_id < b.object_id; });
  return out;
}

double MemoryStore::coverage(size_t n_scene_objects) const {
  if (n_scene_objects == 0) return 0.0;
  return static_cast<double>(facts_.size()) / static_cast<double>(n_scene_objects);
}

MemoryStore seed_memory(const SceneGraph& scene, double p_cover, double p_stale, Rng& rng) {
  if (p_cover < 0.0 || p_cover > 1.0 || p_stale < 0.0 || p_stale > 1.0) {
    throw std::invalid_argument("seed_memory: probabilities must lie in [0,1]");
  }
  MemoryStore store;
  for (const auto& obj : scene.objects) {
    if (!rng.bernoulli(p_cover)) continue;
    MemoryFact fact;
    fact.object_id = obj.id;
    fact.category = obj.category;
    fact.attributes = obj.attributes;
    fact.source = FactSource::Seed;
    fact.recorded_location_id = obj.location_id;
    fact.stale = false;
    if (rng.bernoulli(p_stale) && scene.locations.size() > 1) {
      // resample uniformly from the other locations
      std::vector<std::string> others;
      for (const auto& l : scene.locations) {
        if (l.id != obj.location_id) others.push_back(l.id);
      }
      fact.recorded_location_id = others[rng.below(others.size())];
      fact.stale = true;
    }
    store.upsert(std::move(fact));
  }
  return store;
}

MemoryStore store_from_seed(const SceneGraph& scene, const std::vector<MemorySeedEntry>& seed) {
  MemoryStore store;
  for (const auto& e : seed) {
    const ObjectInstance& obj = scene.object(e.object_id);
    MemoryFact fact;
    fact.object_id = obj.id;
    fact.category = obj.category;
    fact.attributes = obj.attributes;
    fact.recorded_location_id = e.recorded_location_id;
    fact.stale = e.is_stale;
    fact.source = FactSource::Seed;
    if (fact.stale == (fact.recorded_location_id == obj.location_id)) {
      throw std::invalid_argument("memory seed stale flag inconsistent for " + obj.id);
    }
    store.upsert(std::move(fact));
  }
  return store;
}

std::vector<MemorySeedEntry> seed_entries_of(const MemoryStore& store, const SceneGraph& scene) {
  std::vector<MemorySeedEntry> out;
  for (const auto& [id, fact] : store.facts()) {
    (void)scene;
    out.push_back(MemorySeedEntry{id, fact.recorded_location_id, fact.stale});
  }
  return out;
}

void write_observation(MemoryStore& store, const SceneGraph& scene,
                       const std::string& location_id,
                       const std::vector<std::string>& observed_object_ids) {
  // Stale seed facts are corrected by the upsert when their object is seen;
  // uncorrected ones stay in the store (their attribute snapshots remain
  // accurate) and the episode engine refuses to navigate on records whose
  // location it has already inspected.
  for (const auto& id : observed_object_ids) {
    const ObjectInstance& obj = scene.object(id);
    MemoryFact fact;
    fact.object_id = obj.id;
    fact.category = obj.category;
    fact.attributes = obj.attributes;
    fact.recorded_location_id = location_id;
    fact.stale = false;
    fact.source = FactSource::Observed;
    store.upsert(std::move(fact));
  }
}

}  // namespace asknav
