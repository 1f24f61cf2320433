#include "asknav/planner.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace asknav {

namespace {
constexpr uint8_t kNoConstraint = 0xF;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

struct ExpertPlanner::State {
  uint32_t S = 0;         // candidate bitmask, canonical id order
  uint8_t loc = 0;        // location index
  uint8_t n_asks = 0;
  bool mem = false;
  uint8_t steps = 0;
  uint16_t visited = 0;   // location bitmask
  std::array<uint8_t, 3> constraint = {kNoConstraint, kNoConstraint, kNoConstraint};

  uint64_t pack() const {
    uint64_t key = S;
    key = (key << 4) | loc;
    key = (key << 4) | n_asks;
    key = (key << 1) | (mem ? 1u : 0u);
    key = (key << 4) | steps;
    key = (key << 16) | visited;
    key = (key << 4) | constraint[0];
    key = (key << 4) | constraint[1];
    key = (key << 4) | constraint[2];
    return key;
  }
};

ExpertPlanner::ExpertPlanner(const SceneGraph& scene, const Task& task, PlannerConfig config,
                             const MemoryStore& store)
    : scene_(&scene), task_(&task), config_(std::move(config)) {
  validate_task(task, scene);
  config_.cost.validate();
  config_.oracle.validate();
  if (scene.locations.size() > 16) {
    throw std::invalid_argument("planner supports at most 16 locations");
  }
  if (config_.horizon > 15) {
    throw std::invalid_argument("planner supports horizons up to 15");
  }
  fail_penalty_ = config_.fail_penalty;
  build_tables(store);
}

ExpertPlanner::ExpertPlanner(const SceneGraph& scene, const Task& task, PlannerConfig config)
    : ExpertPlanner(scene, task, config, store_from_seed(scene, task.memory_seed)) {}

void ExpertPlanner::build_tables(const MemoryStore& store) {
  cand_ids_ = task_->candidate_ids;
  std::sort(cand_ids_.begin(), cand_ids_.end());

  loc_ids_.clear();
  for (const auto& l : scene_->locations) loc_ids_.push_back(l.id);
  auto loc_index = [&](const std::string& id) {
    for (size_t i = 0; i < loc_ids_.size(); ++i) {
      if (loc_ids_[i] == id) return static_cast<int>(i);
    }
    throw std::invalid_argument("planner: unknown location " + id);
  };

  const size_t n_loc = loc_ids_.size();
  dist_.assign(n_loc, std::vector<double>(n_loc, 0.0));
  for (size_t a = 0; a < n_loc; ++a) {
    for (size_t b = 0; b < n_loc; ++b) {
      dist_[a][b] = distance(*scene_, loc_ids_[a], loc_ids_[b]);
    }
  }
  start_loc_ = loc_index(task_->start_location_id);

  kind_values_.assign(kAttrKindCount, {});
  cand_true_loc_.clear();
  cand_attr_.clear();
  covered_.clear();
  recorded_loc_.clear();
  for (const auto& id : cand_ids_) {
    const ObjectInstance& obj = scene_->object(id);
    cand_true_loc_.push_back(loc_index(obj.location_id));
    std::array<int, 3> attr{};
    for (int k = 0; k < kAttrKindCount; ++k) {
      const std::string& value = obj.attributes.at(kAttrKinds[k]);
      auto& vals = kind_values_[k];
      auto it = std::find(vals.begin(), vals.end(), value);
      if (it == vals.end()) {
        vals.push_back(value);
        attr[k] = static_cast<int>(vals.size()) - 1;
      } else {
        attr[k] = static_cast<int>(it - vals.begin());
      }
    }
    cand_attr_.push_back(attr);
    const MemoryFact* fact = store.find(id);
    covered_.push_back(fact != nullptr);
    recorded_loc_.push_back(fact ? loc_index(fact->recorded_location_id) : -1);
  }
}

namespace {

// shared by the pruning rule and the posterior support
inline bool attr_consistent(const std::array<int, 3>& attr,
                            const std::array<uint8_t, 3>& constraint) {
  for (int k = 0; k < kAttrKindCount; ++k) {
    if (constraint[k] != kNoConstraint && attr[k] != constraint[k]) return false;
  }
  return true;
}

}  // namespace

double ExpertPlanner::value_of(const State& s) {
  if (s.steps >= config_.horizon) return fail_penalty_;
  const uint64_t key = s.pack();
  auto memo_it = memo_.find(key);
  if (memo_it != memo_.end()) return memo_it->second.value;

  const int n_cand = static_cast<int>(cand_ids_.size());

  auto believed = [&](int c) -> int {
    if ((s.visited >> cand_true_loc_[c]) & 1u) return cand_true_loc_[c];
    if (s.mem && covered_[c] && recorded_loc_[c] >= 0 &&
        !((s.visited >> recorded_loc_[c]) & 1u)) {
      return recorded_loc_[c];
    }
    return -1;
  };
  // gated pruning: only candidates with known attributes can be excluded
  auto pruned_set = [&](uint32_t S, bool mem, uint16_t visited,
                        const std::array<uint8_t, 3>& constraint) {
    uint32_t out = 0;
    for (int c = 0; c < n_cand; ++c) {
      if (!((S >> c) & 1u)) continue;
      const bool known = (mem && covered_[c]) || ((visited >> cand_true_loc_[c]) & 1u);
      if (known && !attr_consistent(cand_attr_[c], constraint)) continue;
      out |= 1u << c;
    }
    return out;
  };

  // posterior support: candidates consistent with every constraint
  std::vector<int> consistent;
  for (int c = 0; c < n_cand; ++c) {
    if (((s.S >> c) & 1u) && attr_consistent(cand_attr_[c], s.constraint)) {
      consistent.push_back(c);
    }
  }
  const double n_consistent = static_cast<double>(consistent.size());

  // slots sorted by believed distance, ties by canonical id order
  struct Slot {
    int cand;
    int believed_loc;
    double dist;
  };
  std::vector<Slot> slots;
  for (int c = 0; c < n_cand; ++c) {
    if (!((s.S >> c) & 1u)) continue;
    const int bl = believed(c);
    slots.push_back(Slot{c, bl, bl >= 0 ? dist_[s.loc][bl] : kInf});
  }
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.cand < b.cand;
  });

  // explore target mirrors the engine's scan over the scene's location list
  int explore_target = -1;
  double explore_d = kInf;
  for (size_t li = 0; li < loc_ids_.size(); ++li) {
    if ((s.visited >> li) & 1u) continue;
    const double d = dist_[s.loc][li];
    if (d < explore_d || (d == explore_d && explore_target >= 0 &&
                          loc_ids_[li] < loc_ids_[explore_target])) {
      explore_d = d;
      explore_target = static_cast<int>(li);
    }
  }

  const double lambda = config_.cost.lambda;
  double best_value = kInf;
  double best_cost = kInf;
  int best_tpl = -1;

  auto consider = [&](int tpl, double value, double immediate_cost) {
    if (value < best_value || (value == best_value && immediate_cost < best_cost)) {
      best_value = value;
      best_cost = immediate_cost;
      best_tpl = tpl;
    }
  };

  // ask templates: chance over usefulness, then over the disclosed partition
  const double ask_cost =
      lambda * action_cost(ActionKind::Ask, s.n_asks, std::nullopt, config_.cost);
  const double p_useful = usefulness_probability(s.n_asks + 1, config_.oracle);

  State useless = s;
  useless.n_asks = static_cast<uint8_t>(s.n_asks + 1);
  useless.steps = static_cast<uint8_t>(s.steps + 1);
  double v_useless = -1.0;  // computed lazily, shared by the four ask templates

  auto ask_value = [&](bool open, int kind) {
    if (v_useless < 0.0) v_useless = value_of(useless);
    // cells of the posterior partition in first-occurrence order
    std::vector<std::pair<std::array<uint8_t, 3>, int>> cells;  // (child constraints, count)
    for (int c : consistent) {
      int k = kind;
      if (open) {
        // the respondent picks the kind that prunes the reported set hardest
        int best_count = -1;
        for (int kk = 0; kk < kAttrKindCount; ++kk) {
          int count = 0;
          for (int x = 0; x < n_cand; ++x) {
            if (((s.S >> x) & 1u) && cand_attr_[x][kk] != cand_attr_[c][kk]) ++count;
          }
          if (count > best_count) {
            best_count = count;
            k = kk;
          }
        }
      }
      std::array<uint8_t, 3> child_constraint = s.constraint;
      child_constraint[k] = static_cast<uint8_t>(cand_attr_[c][k]);
      bool found = false;
      for (auto& cell : cells) {
        if (cell.first == child_constraint) {
          ++cell.second;
          found = true;
          break;
        }
      }
      if (!found) cells.emplace_back(child_constraint, 1);
    }
    double acc = 0.0;
    for (const auto& [child_constraint, count] : cells) {
      State child = s;
      child.constraint = child_constraint;
      child.n_asks = static_cast<uint8_t>(s.n_asks + 1);
      child.steps = static_cast<uint8_t>(s.steps + 1);
      child.S = pruned_set(s.S, child.mem, child.visited, child.constraint);
      acc += (static_cast<double>(count) / n_consistent) * value_of(child);
    }
    return ask_cost + (1.0 - p_useful) * v_useless + p_useful * acc;
  };

  for (int k = 0; k < kAttrKindCount; ++k) {
    consider(kTplAskColor + k, ask_value(false, k), ask_cost);
  }
  consider(kTplAskOpen, ask_value(true, 0), ask_cost);

  {  // memory lookup: deterministic against the store
    const double mem_cost =
        lambda * action_cost(ActionKind::GetMemory, s.n_asks, std::nullopt, config_.cost);
    State child = s;
    child.mem = true;
    child.steps = static_cast<uint8_t>(s.steps + 1);
    child.S = pruned_set(s.S, child.mem, child.visited, child.constraint);
    consider(kTplGetMemory, mem_cost + value_of(child), mem_cost);
  }

  for (int i = 0; i < kSlotCount && i < static_cast<int>(slots.size()); ++i) {
    const Slot& slot = slots[i];
    if (slot.believed_loc < 0 || slot.believed_loc == s.loc) continue;
    const double nav_cost = lambda * action_cost(ActionKind::Navigate, s.n_asks,
                                                 dist_[s.loc][slot.believed_loc], config_.cost);
    State child = s;
    child.loc = static_cast<uint8_t>(slot.believed_loc);
    child.visited = static_cast<uint16_t>(s.visited | (1u << slot.believed_loc));
    child.steps = static_cast<uint8_t>(s.steps + 1);
    child.S = pruned_set(s.S, child.mem, child.visited, child.constraint);
    consider(kTplNavSlot0 + i, nav_cost + value_of(child), nav_cost);
  }

  if (explore_target >= 0) {
    const double nav_cost = lambda * action_cost(ActionKind::Navigate, s.n_asks,
                                                 dist_[s.loc][explore_target], config_.cost);
    State child = s;
    child.loc = static_cast<uint8_t>(explore_target);
    child.visited = static_cast<uint16_t>(s.visited | (1u << explore_target));
    child.steps = static_cast<uint8_t>(s.steps + 1);
    child.S = pruned_set(s.S, child.mem, child.visited, child.constraint);
    consider(kTplNavExplore, nav_cost + value_of(child), nav_cost);
  }

  for (int i = 0; i < kSlotCount && i < static_cast<int>(slots.size()); ++i) {
    const int c = slots[i].cand;
    const bool in_support = attr_consistent(cand_attr_[c], s.constraint);
    const double p_success =
        (s.loc == cand_true_loc_[c] && in_support) ? 1.0 / n_consistent : 0.0;
    consider(kTplFoundSlot0 + i, (1.0 - p_success) * fail_penalty_, 0.0);
  }

  memo_[key] = Solution{best_value, best_tpl};
  return best_value;
}

ExpertPlanner::Solution ExpertPlanner::solve_state(
    const std::vector<std::string>& remaining_ids,
    const std::map<std::string, std::string>& constraints, const std::string& location_id,
    int n_asks, bool memory_queried, const std::vector<std::string>& visited,
    int steps_elapsed) {
  State s;
  for (const auto& id : remaining_ids) {
    auto it = std::find(cand_ids_.begin(), cand_ids_.end(), id);
    if (it == cand_ids_.end()) throw std::invalid_argument("planner: unknown candidate " + id);
    s.S |= 1u << (it - cand_ids_.begin());
  }
  for (const auto& [kind, value] : constraints) {
    const int k = attr_kind_index(kind);
    if (k < 0) throw std::invalid_argument("planner: unknown constraint kind " + kind);
    const auto& vals = kind_values_[k];
    auto it = std::find(vals.begin(), vals.end(), value);
    // a value carried by no candidate cannot arise from simulated replies;
    // map it to an unused slot so pruning still applies
    s.constraint[k] = it == vals.end() ? static_cast<uint8_t>(0xE)
                                       : static_cast<uint8_t>(it - vals.begin());
  }
  auto loc_index = [&](const std::string& id) {
    auto it = std::find(loc_ids_.begin(), loc_ids_.end(), id);
    if (it == loc_ids_.end()) throw std::invalid_argument("planner: unknown location " + id);
    return static_cast<int>(it - loc_ids_.begin());
  };
  s.loc = static_cast<uint8_t>(loc_index(location_id));
  s.n_asks = static_cast<uint8_t>(std::min(n_asks, 15));
  s.mem = memory_queried;
  s.steps = static_cast<uint8_t>(std::min(steps_elapsed, config_.horizon));
  for (const auto& v : visited) s.visited |= static_cast<uint16_t>(1u << loc_index(v));

  const double value = value_of(s);
  if (s.steps >= config_.horizon) return Solution{value, -1};
  return memo_.at(s.pack());
}

double ExpertPlanner::root_value() {
  State s;
  s.S = (1u << cand_ids_.size()) - 1u;
  s.loc = static_cast<uint8_t>(start_loc_);
  s.visited = static_cast<uint16_t>(1u << start_loc_);
  // reset observes the start location; with no constraints nothing prunes
  return value_of(s);
}

ExpertPolicy::ExpertPolicy(const SceneGraph& scene, const Task& task, PlannerConfig config)
    : planner_(scene, task, std::move(config)) {}

ActionChoice ExpertPolicy::decide(const DecisionContext& ctx, Rng&) {
  const BeliefView& b = ctx.observation.belief;
  std::vector<std::string> remaining;
  for (const auto& slot : b.slots) remaining.push_back(slot.object_id);
  const auto sol = planner_.solve_state(remaining, b.constraints, ctx.observation.location_id,
                                        b.n_asks, b.n_mems > 0, b.visited, b.steps_elapsed);
  if (sol.best_template < 0 || !ctx.valid_mask[sol.best_template]) {
    throw std::logic_error("expert planner chose an invalid template");
  }
  values_.push_back(sol.value);
  std::ostringstream ss;
  ss << "loc=" << ctx.observation.location_id << " |S|=" << b.n_remaining
     << " asks=" << b.n_asks << " mem=" << (b.n_mems > 0 ? 1 : 0)
     << " constraints=" << b.n_constraints;
  summaries_.push_back(ss.str());
  return ActionChoice{action_for_template(ctx, sol.best_template), 0.0, sol.best_template};
}

ExpertTrace plan(const SceneGraph& scene, const Task& task, const PlannerConfig& config,
                 uint64_t realization_seed) {
  ExpertPolicy policy(scene, task, config);
  EpisodeConfig env_config;
  env_config.cost = config.cost;
  env_config.oracle = config.oracle;
  env_config.horizon = config.horizon;
  // the first solve pays for the whole memo; the wall-clock budget is meant
  // for external agents, not the in-process demonstrator
  env_config.decision_timeout_s = 1e9;
  EpisodeResult result = run_episode(policy, scene, task, env_config, realization_seed,
                                     derive_seed(realization_seed, 0xE5ULL));
  ExpertTrace trace;
  trace.task_id = task.task_id;
  trace.trajectory = result.trajectory;
  trace.decisions = result.decisions;
  const auto& values = policy.step_values();
  const auto& summaries = policy.step_summaries();
  for (size_t i = 0; i < result.trajectory.steps.size(); ++i) {
    ExpertStep step;
    step.action = result.trajectory.steps[i].action;
    step.expected_remaining_cost = i < values.size() ? values[i] : 0.0;
    step.belief_summary = i < summaries.size() ? summaries[i] : "";
    trace.steps.push_back(std::move(step));
  }
  trace.root_value = values.empty() ? 0.0 : values.front();
  return trace;
}

// ---------------------------------------------------------------------------
// brute force: the same decision semantics written against plain sets with no
// memoization, used as an independent cross-check of the planner
// ---------------------------------------------------------------------------

namespace {

struct BfContext {
  const SceneGraph* scene;
  const Task* task;
  const CostParams* cost;
  const OracleConfig* oracle;
  const MemoryStore* store;
  int horizon;
  double fail_penalty;
};

struct BfState {
  std::vector<std::string> remaining;  // sorted ids
  std::map<std::string, std::string> constraints;
  std::string loc;
  int n_asks = 0;
  bool mem = false;
  int steps = 0;
  std::vector<std::string> visited;  // sorted
};

bool bf_visited(const BfState& st, const std::string& loc) {
  return std::binary_search(st.visited.begin(), st.visited.end(), loc);
}

void bf_visit(BfState& st, const std::string& loc) {
  auto it = std::lower_bound(st.visited.begin(), st.visited.end(), loc);
  if (it == st.visited.end() || *it != loc) st.visited.insert(it, loc);
}

bool bf_known(const BfContext& ctx, const BfState& st, const std::string& id) {
  if (st.mem && ctx.store->contains(id)) return true;
  return bf_visited(st, ctx.scene->object(id).location_id);
}

std::optional<std::string> bf_believed(const BfContext& ctx, const BfState& st,
                                       const std::string& id) {
  const std::string& true_loc = ctx.scene->object(id).location_id;
  if (bf_visited(st, true_loc)) return true_loc;
  if (st.mem) {
    const MemoryFact* fact = ctx.store->find(id);
    if (fact && !bf_visited(st, fact->recorded_location_id)) return fact->recorded_location_id;
  }
  return std::nullopt;
}

bool bf_consistent(const BfContext& ctx, const std::string& id,
                   const std::map<std::string, std::string>& constraints) {
  const AttrMap& attrs = ctx.scene->object(id).attributes;
  for (const auto& [kind, value] : constraints) {
    if (attrs.at(kind) != value) return false;
  }
  return true;
}

std::vector<std::string> bf_prune(const BfContext& ctx, const BfState& st) {
  std::vector<std::string> out;
  for (const auto& id : st.remaining) {
    if (bf_known(ctx, st, id) && !bf_consistent(ctx, id, st.constraints)) continue;
    out.push_back(id);
  }
  return out;
}

double bf_value(const BfContext& ctx, const BfState& st);

double bf_ask_value(const BfContext& ctx, const BfState& st, bool open, const std::string& kind) {
  const double ask_cost =
      ctx.cost->lambda * action_cost(ActionKind::Ask, st.n_asks, std::nullopt, *ctx.cost);
  const double p_useful = usefulness_probability(st.n_asks + 1, *ctx.oracle);

  BfState useless = st;
  useless.n_asks += 1;
  useless.steps += 1;
  const double v_useless = bf_value(ctx, useless);

  std::vector<std::string> support;
  for (const auto& id : st.remaining) {
    if (bf_consistent(ctx, id, st.constraints)) support.push_back(id);
  }
  const double n_support = static_cast<double>(support.size());

  // partition cells in first-occurrence order over the id-sorted support
  std::vector<std::pair<std::map<std::string, std::string>, int>> cells;
  for (const auto& gt : support) {
    std::string k = kind;
    if (open) k = max_pruning_kind(*ctx.scene, gt, st.remaining);
    std::map<std::string, std::string> child_constraints = st.constraints;
    child_constraints[k] = ctx.scene->object(gt).attributes.at(k);
    bool found = false;
    for (auto& cell : cells) {
      if (cell.first == child_constraints) {
        ++cell.second;
        found = true;
        break;
      }
    }
    if (!found) cells.emplace_back(child_constraints, 1);
  }
  double acc = 0.0;
  for (const auto& [child_constraints, count] : cells) {
    BfState child = st;
    child.constraints = child_constraints;
    child.n_asks += 1;
    child.steps += 1;
    child.remaining = bf_prune(ctx, child);
    acc += (static_cast<double>(count) / n_support) * bf_value(ctx, child);
  }
  return ask_cost + (1.0 - p_useful) * v_useless + p_useful * acc;
}

double bf_value(const BfContext& ctx, const BfState& st) {
  if (st.steps >= ctx.horizon) return ctx.fail_penalty;

  std::vector<std::string> support;
  for (const auto& id : st.remaining) {
    if (bf_consistent(ctx, id, st.constraints)) support.push_back(id);
  }
  const double n_support = static_cast<double>(support.size());

  struct Slot {
    std::string id;
    std::optional<std::string> believed;
    double dist;
  };
  std::vector<Slot> slots;
  for (const auto& id : st.remaining) {
    auto believed = bf_believed(ctx, st, id);
    const double d = believed ? distance(*ctx.scene, st.loc, *believed)
                              : std::numeric_limits<double>::infinity();
    slots.push_back(Slot{id, believed, d});
  }
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;
  });

  std::optional<std::string> explore;
  double explore_d = std::numeric_limits<double>::infinity();
  for (const auto& l : ctx.scene->locations) {
    if (bf_visited(st, l.id)) continue;
    const double d = distance(*ctx.scene, st.loc, l.id);
    if (d < explore_d || (d == explore_d && explore && l.id < *explore)) {
      explore_d = d;
      explore = l.id;
    }
  }

  double best_value = kInf;
  double best_cost = kInf;
  auto consider = [&](double value, double immediate_cost) {
    if (value < best_value || (value == best_value && immediate_cost < best_cost)) {
      best_value = value;
      best_cost = immediate_cost;
    }
  };

  const double ask_cost =
      ctx.cost->lambda * action_cost(ActionKind::Ask, st.n_asks, std::nullopt, *ctx.cost);
  for (int k = 0; k < kAttrKindCount; ++k) {
    consider(bf_ask_value(ctx, st, false, kAttrKinds[k]), ask_cost);
  }
  consider(bf_ask_value(ctx, st, true, ""), ask_cost);

  {
    const double mem_cost =
        ctx.cost->lambda * action_cost(ActionKind::GetMemory, st.n_asks, std::nullopt, *ctx.cost);
    BfState child = st;
    child.mem = true;
    child.steps += 1;
    child.remaining = bf_prune(ctx, child);
    consider(mem_cost + bf_value(ctx, child), mem_cost);
  }

  for (int i = 0; i < kSlotCount && i < static_cast<int>(slots.size()); ++i) {
    const Slot& slot = slots[i];
    if (!slot.believed || *slot.believed == st.loc) continue;
    const double nav_cost =
        ctx.cost->lambda * action_cost(ActionKind::Navigate, st.n_asks, slot.dist, *ctx.cost);
    BfState child = st;
    child.loc = *slot.believed;
    bf_visit(child, *slot.believed);
    child.steps += 1;
    child.remaining = bf_prune(ctx, child);
    consider(nav_cost + bf_value(ctx, child), nav_cost);
  }

  if (explore) {
    const double nav_cost =
        ctx.cost->lambda * action_cost(ActionKind::Navigate, st.n_asks, explore_d, *ctx.cost);
    BfState child = st;
    child.loc = *explore;
    bf_visit(child, *explore);
    child.steps += 1;
    child.remaining = bf_prune(ctx, child);
    consider(nav_cost + bf_value(ctx, child), nav_cost);
  }

  for (int i = 0; i < kSlotCount && i < static_cast<int>(slots.size()); ++i) {
    const std::string& id = slots[i].id;
    const bool in_support = std::find(support.begin(), support.end(), id) != support.end();
    const bool co_located = ctx.scene->object(id).location_id == st.loc;
    const double p_success = (co_located && in_support) ? 1.0 / n_support : 0.0;
    consider((1.0 - p_success) * ctx.fail_penalty, 0.0);
  }

  return best_value;
}

}  // namespace

double brute_force_value(const SceneGraph& scene, const Task& task, const CostParams& cost,
                         const OracleConfig& oracle, const MemoryStore& store, int horizon,
                         double fail_penalty) {
  if (task.candidate_ids.size() > 3) {
    throw std::invalid_argument("brute_force_value: more than 3 candidates");
  }
  if (horizon > 6) throw std::invalid_argument("brute_force_value: horizon above 6");
  validate_task(task, scene);

  BfContext ctx{&scene, &task, &cost, &oracle, &store, horizon, fail_penalty};
  BfState root;
  root.remaining = task.candidate_ids;
  std::sort(root.remaining.begin(), root.remaining.end());
  root.loc = task.start_location_id;
  bf_visit(root, task.start_location_id);
  return bf_value(ctx, root);
}

double brute_force_value(const SceneGraph& scene, const Task& task, const CostParams& cost,
                         const OracleConfig& oracle, int horizon, double fail_penalty) {
  const MemoryStore store = store_from_seed(scene, task.memory_seed);
  return brute_force_value(scene, task, cost, oracle, store, horizon, fail_penalty);
}

CorpusResult generate_sft_corpus(const std::vector<Task>& tasks,
                                 const std::map<std::string, SceneGraph>& scenes,
                                 const PlannerConfig& config, uint64_t master_seed, int workers) {
  CorpusResult result;
  std::vector<ExpertTrace> slots(tasks.size());
  std::vector<char> kept(tasks.size(), 0);

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      const SceneGraph& scene = scenes.at(task.scene_id);
      for (int attempt = 0; attempt < 3; ++attempt) {
        ExpertTrace trace = plan(scene, task, config, derive_seed(master_seed, i, attempt));
        if (trace.trajectory.outcome == Outcome::Success) {
          slots[i] = std::move(trace);
          kept[i] = 1;
          break;
        }
      }
    }
  };

  const int n_workers = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers - 1; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (size_t i = 0; i < tasks.size(); ++i) {
    if (kept[i]) {
      result.traces.push_back(std::move(slots[i]));
    } else {
      ++result.dropped;
      std::cerr << "corpus: dropped task " << tasks[i].task_id
                << " after 3 failed realizations\n";
    }
  }
  return result;
}

}  // namespace asknav
