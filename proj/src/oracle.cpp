#include "asknav/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace asknav {

void OracleConfig::validate() const {
  if (eta < 0.0) throw std::invalid_argument("oracle config: eta must be >= 0");
  if (p_floor < 0.0 || p_floor > 1.0) {
    throw std::invalid_argument("oracle config: p_floor must lie in [0,1]");
  }
}

double usefulness_probability(int question_index, const OracleConfig& config) {
  if (question_index < 1) throw std::invalid_argument("question index is 1-based");
  const double p = std::exp(-config.eta * static_cast<double>(question_index - 1));
  return std::max(config.p_floor, p);
}

OracleState::OracleState(const SceneGraph& scene, const Task& task, OracleConfig config,
                         uint64_t rng_seed)
    : scene_(&scene), task_(&task), config_(config), rng_(rng_seed) {
  config_.validate();
}

std::string max_pruning_kind(const SceneGraph& scene, const std::string& gt_id,
                             const std::vector<std::string>& remaining_candidates) {
  const ObjectInstance& gt = scene.object(gt_id);
  int best_count = -1;
  std::string best_kind = kAttrKinds[0];
  for (int k = 0; k < kAttrKindCount; ++k) {
    const std::string kind = kAttrKinds[k];
    int count = 0;
    for (const auto& id : remaining_candidates) {
      if (scene.object(id).attributes.at(kind) != gt.attributes.at(kind)) ++count;
    }
    if (count > best_count) {  // strict: ties keep the earlier registry kind
      best_count = count;
      best_kind = kind;
    }
  }
  return best_kind;
}

OracleReply OracleState::answer(const OracleQuery& query,
                                const std::vector<std::string>& remaining_candidates) {
  if (ended_) throw std::logic_error("oracle: query after episode end");
  if (!query.open && !is_attr_kind(query.kind)) {
    throw std::invalid_argument("oracle: unknown attribute kind " + query.kind);
  }
  const int n = n_answered_ + 1;
  const double p = usefulness_probability(n, config_);
  const bool useful = rng_.uniform01() < p;
  ++n_answered_;

  OracleReply reply;
  if (!useful) {
    reply.useful = false;
    reply.text = "I'm not sure, sorry.";
    return reply;
  }
  const ObjectInstance& gt = scene_->object(task_->gt_target_id);
  const std::string kind =
      query.open ? max_pruning_kind(*scene_, task_->gt_target_id, remaining_candidates)
                 : query.kind;
  const std::string value = gt.attributes.at(kind);
  reply.useful = true;
  reply.disclosed = std::make_pair(kind, value);
  if (kind == "nearest_landmark") {
    reply.text = "It's the one near the " + value + ".";
  } else {
    reply.text = "It's the " + value + " one.";
  }
  return reply;
}

OracleReply interactive_answer(const OracleQuery& query,
                               const std::vector<std::string>& remaining_candidates,
                               std::istream& in, std::ostream& out) {
  out << "[oracle] question: " << (query.open ? "which one do you mean?" : query.kind + "?")
      << "\n[oracle] remaining candidates:";
  for (const auto& id : remaining_candidates) out << " " << id;
  out << "\n[oracle] reply with \"<kind>=<value>\" (kinds: color, size, nearest_landmark) or \"pass\"\n";

  for (int attempt = 0; attempt < 3; ++attempt) {
    out << "> " << std::flush;
    std::string line;
    if (!std::getline(in, line)) break;
    // trim
    const auto first = line.find_first_not_of(" \t\r\n");
    const auto last = line.find_last_not_of(" \t\r\n");
    line = first == std::string::npos ? "" : line.substr(first, last - first + 1);
    if (line == "pass") {
      OracleReply r;
      r.useful = false;
      r.text = "(pass)";
      return r;
    }
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      const std::string kind = line.substr(0, eq);
      const std::string value = line.substr(eq + 1);
      if (is_attr_kind(kind) && !value.empty()) {
        OracleReply r;
        r.useful = true;
        r.disclosed = std::make_pair(kind, value);
        r.text = "It's the one with " + kind + " " + value + ".";
        return r;
      }
    }
    out << "[oracle] could not parse that.\n";
  }
  OracleReply r;
  r.useful = false;
  r.text = "(no usable answer)";
  return r;
}

}  // namespace asknav
