#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asknav/action.hpp"
#include "asknav/costs.hpp"
#include "asknav/memory.hpp"
#include "asknav/oracle.hpp"
#include "asknav/rng.hpp"
#include "asknav/scene.hpp"

namespace asknav {

// Fixed template set the policies act over:
//   0..2  Ask(color|size|nearest_landmark)
//   3     Ask(open)
//   4     GetMemory(instruction category)
//   5..9  Navigate(candidate slot 1..5), slots sorted by believed distance
//   10    Navigate(nearest unvisited location)
//   11..15 Found(candidate slot 1..5)
inline constexpr int kTemplateCount = 16;
inline constexpr int kTplAskColor = 0;
inline constexpr int kTplAskOpen = 3;
inline constexpr int kTplGetMemory = 4;
inline constexpr int kTplNavSlot0 = 5;
inline constexpr int kTplNavExplore = 10;
inline constexpr int kTplFoundSlot0 = 11;
inline constexpr int kSlotCount = 5;

std::string template_name(int tpl);

struct EpisodeConfig {
  CostParams cost;
  OracleConfig oracle;
  int horizon = 12;
  bool mask_ask = false;     // ablation: remove the Ask action
  bool mask_memory = false;  // ablation: remove the GetMemory action
  double decision_timeout_s = 10.0;
};

// What the policy sees about one candidate slot.
struct BeliefSlot {
  std::string object_id;
  bool location_known = false;
  std::string believed_location_id;  // empty when unknown
  double distance = 0.0;             // believed distance in meters; diameter when unknown
  bool co_located = false;
};

struct BeliefView {
  std::vector<BeliefSlot> slots;  // remaining candidates sorted by believed distance
  std::string category;           // the instruction category (GetMemory key)
  std::string explore_target;     // nearest unvisited location; empty when all visited
  int n_remaining = 0;
  int n_asks = 0;
  int n_mems = 0;
  int n_constraints = 0;
  int steps_elapsed = 0;
  int horizon = 12;
  bool last_ask_useful = false;
  double scene_diameter = 1.0;
  std::map<std::string, std::string> constraints;
  std::vector<std::string> visited;  // locations occupied so far, sorted
};

struct VisibleObject {
  std::string id;
  std::string category;
  AttrMap attributes;

  bool operator==(const VisibleObject&) const = default;
};

struct Observation {
  std::string location_id;
  std::vector<VisibleObject> visible_objects;
  std::optional<OracleReply> last_reply;
  std::optional<std::vector<MemoryFact>> last_memory;
  BeliefView belief;
};

struct StepResult {
  Observation observation;
  double cost = 0.0;
  bool done = false;
  std::optional<Outcome> outcome;
  bool malformed = false;
};

// Agent-side belief: the remaining candidate set plus everything the agent
// has learned. `believed_location` may be misdirected by stale memory; it is
// never used to prune. Pruning happens only when a known attribute
// contradicts a constraint disclosed by the oracle, which keeps the ground
// truth in the set at all times.
struct BeliefState {
  std::vector<std::string> remaining;  // sorted by id
  std::string agent_location_id;
  int n_asks = 0;
  int n_mems = 0;
  int steps_elapsed = 0;
  int format_strikes = 0;
  std::map<std::string, std::string> constraints;       // kind -> GT value
  std::set<std::string> attrs_known;                    // candidates with known attributes
  std::map<std::string, std::string> believed_location; // candidate -> location
  std::set<std::string> visited;                        // locations ever occupied
  bool memory_queried = false;
  bool last_ask_useful = false;
};

class Episode {
 public:
  Episode(const SceneGraph& scene, const Task& task, EpisodeConfig config, uint64_t seed);

  const Observation& observation() const { return obs_; }
  std::vector<bool> valid_mask() const;
  // Concrete action for a template index; throws on invalid/masked templates.
  Action resolve_template(int tpl) const;
  // Template index an action corresponds to in the current state; -1 if none.
  int template_of(const Action& action) const;

  StepResult step(const Action& action);

  bool done() const { return done_; }
  Outcome outcome() const;
  const BeliefState& belief() const { return belief_; }
  const MemoryStore& store() const { return store_; }
  const SceneGraph& scene() const { return *scene_; }
  const Task& task() const { return *task_; }
  const EpisodeConfig& config() const { return config_; }
  uint64_t seed() const { return seed_; }

  // Slots in view order (sorted by believed distance, ties by id).
  std::vector<BeliefSlot> slots() const;

  // Swappable question channel; the default forwards to the fatigue oracle.
  using AskHandler = std::function<OracleReply(const OracleQuery&, const std::vector<std::string>&)>;
  void set_ask_handler(AskHandler handler) { ask_handler_ = std::move(handler); }

 private:
  void observe_current_location();
  void prune();
  void refresh_observation(std::optional<OracleReply> reply,
                           std::optional<std::vector<MemoryFact>> facts);
  std::optional<std::string> nearest_unvisited() const;
  bool action_is_well_formed(const Action& a) const;

  const SceneGraph* scene_;
  const Task* task_;
  EpisodeConfig config_;
  uint64_t seed_;
  MemoryStore store_;
  OracleState oracle_;
  BeliefState belief_;
  Observation obs_;
  bool done_ = false;
  std::optional<Outcome> outcome_;
  double diameter_ = 1.0;
  AskHandler ask_handler_;
};

// Policy decision: the concrete action plus its log-probability under the
// acting policy (0 for deterministic policies).
struct ActionChoice {
  Action action;
  double log_prob = 0.0;
  int template_index = -1;  // -1 when the policy did not pick via template
};

struct DecisionContext {
  const Observation& observation;
  const std::vector<bool>& valid_mask;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual ActionChoice decide(const DecisionContext& ctx, Rng& rng) = 0;
  // Called when an episode begins so stateful policies can reset.
  virtual void begin_episode() {}
};

// Per-decision data kept for training (not persisted in trajectory logs).
struct DecisionRecord {
  std::vector<double> features;
  std::vector<bool> mask;
  int template_index = -1;
  double log_prob = 0.0;
};

struct EpisodeResult {
  Trajectory trajectory;
  std::vector<DecisionRecord> decisions;
};

EpisodeResult run_episode(Policy& policy, const SceneGraph& scene, const Task& task,
                          const EpisodeConfig& config, uint64_t env_seed, uint64_t policy_seed);

}  // namespace asknav
