#include "asknav/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace asknav {

std::string template_name(int tpl) {
  if (tpl >= kTplAskColor && tpl < kTplAskOpen) {
    return std::string("ask_") + kAttrKinds[tpl - kTplAskColor];
  }
  if (tpl == kTplAskOpen) return "ask_open";
  if (tpl == kTplGetMemory) return "get_memory";
  if (tpl >= kTplNavSlot0 && tpl < kTplNavSlot0 + kSlotCount) {
    return "navigate_slot" + std::to_string(tpl - kTplNavSlot0 + 1);
  }
  if (tpl == kTplNavExplore) return "navigate_explore";
  if (tpl >= kTplFoundSlot0 && tpl < kTplFoundSlot0 + kSlotCount) {
    return "found_slot" + std::to_string(tpl - kTplFoundSlot0 + 1);
  }
  return "invalid";
}

Episode::Episode(const SceneGraph& scene, const Task& task, EpisodeConfig config, uint64_t seed)
    : scene_(&scene),
      task_(&task),
      config_(std::move(config)),
      seed_(seed),
      store_(store_from_seed(scene, task.memory_seed)),
      oracle_(scene, task, config_.oracle, derive_seed(seed, 0x0Aac1eULL)) {
  validate_task(task, scene);
  config_.cost.validate();
  diameter_ = scene.diameter();
  if (diameter_ <= 0.0) diameter_ = 1.0;

  belief_.remaining = task.candidate_ids;
  std::sort(belief_.remaining.begin(), belief_.remaining.end());
  belief_.agent_location_id = task.start_location_id;
  belief_.visited.insert(task.start_location_id);

  ask_handler_ = [this](const OracleQuery& q, const std::vector<std::string>& remaining) {
    return oracle_.answer(q, remaining);
  };

  observe_current_location();
  prune();
  refresh_observation(std::nullopt, std::nullopt);
}

void Episode::observe_current_location() {
  const std::string& loc = belief_.agent_location_id;
  std::vector<std::string> seen;
  for (const auto& obj : scene_->objects) {
    if (obj.location_id == loc) seen.push_back(obj.id);
  }
  for (const auto& id : seen) {
    if (std::find(task_->candidate_ids.begin(), task_->candidate_ids.end(), id) !=
        task_->candidate_ids.end()) {
      belief_.attrs_known.insert(id);
      belief_.believed_location[id] = loc;
    }
  }
  // a belief that pointed a candidate here is discredited if it is absent
  std::vector<std::string> wrong;
  for (const auto& [id, bl] : belief_.believed_location) {
    if (bl == loc && scene_->object(id).location_id != loc) wrong.push_back(id);
  }
  for (const auto& id : wrong) belief_.believed_location.erase(id);
  write_observation(store_, *scene_, loc, seen);
}

void Episode::prune() {
  if (belief_.constraints.empty()) return;
  std::vector<std::string> kept;
  for (const auto& id : belief_.remaining) {
    bool contradicted = false;
    if (belief_.attrs_known.count(id)) {
      const AttrMap& attrs = scene_->object(id).attributes;
      for (const auto& [kind, value] : belief_.constraints) {
        if (attrs.at(kind) != value) {
          contradicted = true;
          break;
        }
      }
    }
    if (!contradicted) kept.push_back(id);
  }
  belief_.remaining = std::move(kept);
}

std::vector<BeliefSlot> Episode::slots() const {
  std::vector<BeliefSlot> out;
  for (const auto& id : belief_.remaining) {
    BeliefSlot s;
    s.object_id = id;
    auto it = belief_.believed_location.find(id);
    if (it != belief_.believed_location.end()) {
      s.location_known = true;
      s.believed_location_id = it->second;
      s.distance = distance(*scene_, belief_.agent_location_id, it->second);
      s.co_located = it->second == belief_.agent_location_id;
    } else {
      s.location_known = false;
      s.distance = diameter_;
      s.co_located = false;
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const BeliefSlot& a, const BeliefSlot& b) {
    const double da = a.location_known ? a.distance : std::numeric_limits<double>::infinity();
    const double db = b.location_known ? b.distance : std::numeric_limits<double>::infinity();
    if (da != db) return da < db;
    return a.object_id < b.object_id;
  });
  return out;
}

std::optional<std::string> Episode::nearest_unvisited() const {
  std::optional<std::string> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& l : scene_->locations) {
    if (belief_.visited.count(l.id)) continue;
    const double d = distance(*scene_, belief_.agent_location_id, l.id);
    if (d < best_d || (d == best_d && best && l.id < *best)) {
      best_d = d;
      best = l.id;
    }
  }
  return best;
}

std::vector<bool> Episode::valid_mask() const {
  std::vector<bool> mask(kTemplateCount, false);
  for (int k = 0; k < kAttrKindCount; ++k) mask[kTplAskColor + k] = !config_.mask_ask;
  mask[kTplAskOpen] = !config_.mask_ask;
  mask[kTplGetMemory] = !config_.mask_memory;
  const auto ss = slots();
  for (int i = 0; i < kSlotCount; ++i) {
    const bool have = i < static_cast<int>(ss.size());
    mask[kTplNavSlot0 + i] = have && ss[i].location_known && !ss[i].co_located;
    mask[kTplFoundSlot0 + i] = have;
  }
  mask[kTplNavExplore] = nearest_unvisited().has_value();
  return mask;
}

Action Episode::resolve_template(int tpl) const {
  const auto mask = valid_mask();
  if (tpl < 0 || tpl >= kTemplateCount || !mask[tpl]) {
    throw std::invalid_argument("cannot resolve invalid template " + std::to_string(tpl));
  }
  if (tpl >= kTplAskColor && tpl < kTplAskOpen) return make_ask_kind(kAttrKinds[tpl - kTplAskColor]);
  if (tpl == kTplAskOpen) return make_ask_open();
  if (tpl == kTplGetMemory) return make_get_memory(task_->category);
  if (tpl >= kTplNavSlot0 && tpl < kTplNavSlot0 + kSlotCount) {
    const auto ss = slots();
    const auto& slot = ss[tpl - kTplNavSlot0];
    return make_navigate(belief_.believed_location.at(slot.object_id));
  }
  if (tpl == kTplNavExplore) return make_navigate(*nearest_unvisited());
  const auto ss = slots();
  return make_found(ss[tpl - kTplFoundSlot0].object_id);
}

int Episode::template_of(const Action& action) const {
  switch (action.kind) {
    case ActionKind::Ask:
      if (action.ask_open) return kTplAskOpen;
      {
        const int k = attr_kind_index(action.ask_kind);
        return k >= 0 ? kTplAskColor + k : -1;
      }
    case ActionKind::GetMemory:
      return action.memory_key == task_->category ? kTplGetMemory : -1;
    case ActionKind::Navigate: {
      const auto ss = slots();
      for (size_t i = 0; i < ss.size() && i < kSlotCount; ++i) {
        if (ss[i].location_known && !ss[i].co_located &&
            belief_.believed_location.at(ss[i].object_id) == action.location_id) {
          return kTplNavSlot0 + static_cast<int>(i);
        }
      }
      const auto nu = nearest_unvisited();
      if (nu && *nu == action.location_id) return kTplNavExplore;
      return -1;
    }
    case ActionKind::Found: {
      const auto ss = slots();
      for (size_t i = 0; i < ss.size() && i < kSlotCount; ++i) {
        if (ss[i].object_id == action.object_id) return kTplFoundSlot0 + static_cast<int>(i);
      }
      return -1;
    }
  }
  return -1;
}

bool Episode::action_is_well_formed(const Action& a) const {
  switch (a.kind) {
    case ActionKind::Navigate:
      return scene_->has_location(a.location_id);
    case ActionKind::Ask:
      if (config_.mask_ask) return false;
      return a.ask_open || is_attr_kind(a.ask_kind);
    case ActionKind::GetMemory:
      if (config_.mask_memory) return false;
      return !a.memory_key.empty();
    case ActionKind::Found:
      return scene_->has_object(a.object_id);
  }
  return false;
}

void Episode::refresh_observation(std::optional<OracleReply> reply,
                                  std::optional<std::vector<MemoryFact>> facts) {
  Observation obs;
  obs.location_id = belief_.agent_location_id;
  for (const auto& obj : scene_->objects) {
    if (obj.location_id == belief_.agent_location_id) {
      obs.visible_objects.push_back(VisibleObject{obj.id, obj.category, obj.attributes});
    }
  }
  obs.last_reply = std::move(reply);
  obs.last_memory = std::move(facts);

  BeliefView view;
  view.slots = slots();
  view.category = task_->category;
  const auto nu = nearest_unvisited();
  view.explore_target = nu.value_or("");
  view.n_remaining = static_cast<int>(belief_.remaining.size());
  view.n_asks = belief_.n_asks;
  view.n_mems = belief_.n_mems;
  view.n_constraints = static_cast<int>(belief_.constraints.size());
  view.steps_elapsed = belief_.steps_elapsed;
  view.horizon = config_.horizon;
  view.last_ask_useful = belief_.last_ask_useful;
  view.scene_diameter = diameter_;
  view.constraints = belief_.constraints;
  view.visited.assign(belief_.visited.begin(), belief_.visited.end());
  obs.belief = std::move(view);
  obs_ = std::move(obs);
}

Outcome Episode::outcome() const {
  if (!outcome_.has_value()) throw std::logic_error("episode not finished");
  return *outcome_;
}

StepResult Episode::step(const Action& action) {
  if (done_) throw std::logic_error("step after episode end");

  StepResult res;
  if (!action_is_well_formed(action)) {
    ++belief_.format_strikes;
    res.cost = config_.cost.c_format;
    res.malformed = true;
    if (belief_.format_strikes >= 2) {
      done_ = true;
      outcome_ = Outcome::Failure;
    }
    // re-deliver the previous observation unchanged
    res.observation = obs_;
    res.done = done_;
    res.outcome = outcome_;
    return res;
  }
  belief_.format_strikes = 0;
  ++belief_.steps_elapsed;

  switch (action.kind) {
    case ActionKind::Navigate: {
      const double d = distance(*scene_, belief_.agent_location_id, action.location_id);
      res.cost = action_cost(ActionKind::Navigate, belief_.n_asks, d, config_.cost);
      belief_.agent_location_id = action.location_id;
      belief_.visited.insert(action.location_id);
      observe_current_location();
      prune();
      refresh_observation(std::nullopt, std::nullopt);
      break;
    }
    case ActionKind::Ask: {
      res.cost = action_cost(ActionKind::Ask, belief_.n_asks, std::nullopt, config_.cost);
      const OracleQuery query =
          action.ask_open ? OracleQuery::open_question() : OracleQuery::about(action.ask_kind);
      OracleReply reply = ask_handler_(query, belief_.remaining);
      ++belief_.n_asks;
      belief_.last_ask_useful = reply.useful;
      if (reply.useful && reply.disclosed.has_value()) {
        belief_.constraints[reply.disclosed->first] = reply.disclosed->second;
        prune();
      }
      refresh_observation(std::move(reply), std::nullopt);
      break;
    }
    case ActionKind::GetMemory: {
      res.cost = action_cost(ActionKind::GetMemory, belief_.n_asks, std::nullopt, config_.cost);
      std::vector<MemoryFact> facts = store_.retrieve(action.memory_key);
      ++belief_.n_mems;
      belief_.memory_queried = true;
      for (const auto& fact : facts) {
        const bool is_candidate =
            std::find(task_->candidate_ids.begin(), task_->candidate_ids.end(), fact.object_id) !=
            task_->candidate_ids.end();
        if (!is_candidate) continue;
        belief_.attrs_known.insert(fact.object_id);
        if (!belief_.believed_location.count(fact.object_id) &&
            !belief_.visited.count(fact.recorded_location_id)) {
          // an already-visited recorded location would have been confirmed or
          // discredited on sight; only fresh records steer navigation
          belief_.believed_location[fact.object_id] = fact.recorded_location_id;
        }
      }
      prune();
      refresh_observation(std::nullopt, std::move(facts));
      break;
    }
    case ActionKind::Found: {
      res.cost = 0.0;
      done_ = true;
      const ObjectInstance& gt = scene_->object(task_->gt_target_id);
      const bool success =
          action.object_id == task_->gt_target_id && belief_.agent_location_id == gt.location_id;
      outcome_ = success ? Outcome::Success : Outcome::Failure;
      oracle_.end_episode();
      refresh_observation(std::nullopt, std::nullopt);
      break;
    }
  }

  if (!done_ && belief_.steps_elapsed >= config_.horizon) {
    done_ = true;
    outcome_ = Outcome::Timeout;
    oracle_.end_episode();
  }
  res.observation = obs_;
  res.done = done_;
  res.outcome = outcome_;
  return res;
}

}  // namespace asknav
