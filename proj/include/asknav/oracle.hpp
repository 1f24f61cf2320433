#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "asknav/rng.hpp"
#include "asknav/scene.hpp"

namespace asknav {

struct OracleConfig {
  double eta = 0.5;      // fatigue decay rate per question
  double p_floor = 0.05; // minimum usefulness probability

  void validate() const;

  bool operator==(const OracleConfig&) const = default;
};

struct OracleQuery {
  bool open = false;
  std::string kind;  // attribute kind when not open

  static OracleQuery open_question() { return OracleQuery{true, {}}; }
  static OracleQuery about(std::string kind) { return OracleQuery{false, std::move(kind)}; }
};

struct OracleReply {
  bool useful = false;
  std::optional<std::pair<std::string, std::string>> disclosed;  // (kind, value), true of GT
  std::string text;
};

// Usefulness probability of the n-th question (1-based):
// p(n) = max(p_floor, exp(-eta * (n - 1))). The first question is always
// answered usefully.
double usefulness_probability(int question_index, const OracleConfig& config);

// Simulated respondent for one episode. Fatigue persists across questions
// within the episode and resets with a new state.
class OracleState {
 public:
  OracleState(const SceneGraph& scene, const Task& task, OracleConfig config, uint64_t rng_seed);

  // remaining_candidates is the agent-reported candidate set; an open query is
  // answered with the attribute kind that maximally prunes it (ties broken in
  // registry order).
  OracleReply answer(const OracleQuery& query, const std::vector<std::string>& remaining_candidates);

  int n_answered() const { return n_answered_; }
  void end_episode() { ended_ = true; }

 private:
  const SceneGraph* scene_;
  const Task* task_;
  OracleConfig config_;
  Rng rng_;
  int n_answered_ = 0;
  bool ended_ = false;
};

// Picks the attribute kind whose disclosure would remove the most candidates,
// given the ground-truth object; ties resolve in registry order.
std::string max_pruning_kind(const SceneGraph& scene, const std::string& gt_id,
                             const std::vector<std::string>& remaining_candidates);

// Human-as-oracle input: renders the query and candidates on `out`, then
// parses "kind=value" or "pass" from `in`, reprompting up to 3 times before
// giving a no-information reply.
OracleReply interactive_answer(const OracleQuery& query,
                               const std::vector<std::string>& remaining_candidates,
                               std::istream& in, std::ostream& out);

}  // namespace asknav
