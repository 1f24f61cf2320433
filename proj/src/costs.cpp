#include "asknav/costs.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace asknav {

using nlohmann::json;

void CostParams::validate() const {
  if (!(c_nav > c_ask_base)) throw std::invalid_argument("cost params: need c_nav > c_ask_base");
  if (!(c_ask_base > c_mem)) throw std::invalid_argument("cost params: need c_ask_base > c_mem");
  if (!(c_mem > 0.0)) throw std::invalid_argument("cost params: need c_mem > 0");
  if (alpha < 0.0 || lambda < 0.0 || c_format < 0.0) {
    throw std::invalid_argument("cost params: alpha, lambda, c_format must be nonnegative");
  }
  if (!(c_ref > 0.0)) throw std::invalid_argument("cost params: need c_ref > 0");
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Failure: return "failure";
    case Outcome::Timeout: return "timeout";
  }
  return "failure";
}

Outcome outcome_from_string(const std::string& s) {
  if (s == "success") return Outcome::Success;
  if (s == "failure") return Outcome::Failure;
  if (s == "timeout") return Outcome::Timeout;
  throw std::invalid_argument("unknown outcome: " + s);
}

double action_cost(ActionKind kind, int n_prior_asks, std::optional<double> nav_distance,
                   const CostParams& params) {
  switch (kind) {
    case ActionKind::Navigate: {
      if (!nav_distance.has_value()) {
        throw std::invalid_argument("action_cost: Navigate requires a distance");
      }
      if (*nav_distance < 0.0) {
        throw std::invalid_argument("action_cost: negative distance");
      }
      return params.c_nav * (*nav_distance);
    }
    case ActionKind::Ask: {
      if (nav_distance.has_value()) {
        throw std::invalid_argument("action_cost: distance supplied for non-Navigate action");
      }
      if (n_prior_asks < 0) throw std::invalid_argument("action_cost: negative ask count");
      return params.c_ask_base * (1.0 + params.alpha * static_cast<double>(n_prior_asks));
    }
    case ActionKind::GetMemory:
      if (nav_distance.has_value()) {
        throw std::invalid_argument("action_cost: distance supplied for non-Navigate action");
      }
      return params.c_mem;
    case ActionKind::Found:
      if (nav_distance.has_value()) {
        throw std::invalid_argument("action_cost: distance supplied for non-Navigate action");
      }
      return 0.0;  // terminal declaration is unpriced; failure risk is carried by r_fail
  }
  return 0.0;
}

double action_cost(const Action& action, int n_prior_asks, std::optional<double> nav_distance,
                   const CostParams& params) {
  return action_cost(action.kind, n_prior_asks, nav_distance, params);
}

double trajectory_return(const Trajectory& traj, const CostParams& params) {
  double cost_sum = 0.0;
  for (const auto& s : traj.steps) cost_sum += s.cost;
  const double r_task = traj.outcome == Outcome::Success ? params.r_success : params.r_fail;
  return r_task - params.lambda * cost_sum;
}

namespace {

void fill_core(MetricsReport& r, const std::vector<Trajectory>& episodes,
               const CostParams& params) {
  int successes = 0;
  double success_cost = 0.0;
  double len_sum = 0.0;
  for (const auto& t : episodes) {
    if (t.outcome == Outcome::Success) {
      ++successes;
      success_cost += t.total_cost;
    }
    len_sum += static_cast<double>(t.steps.size());
    for (const auto& s : t.steps) r.action_histogram[to_string(s.action.kind)]++;
  }
  const double n = static_cast<double>(episodes.size());
  r.n_episodes = static_cast<int>(episodes.size());
  r.sr = static_cast<double>(successes) / n;
  r.traj_len_mean = len_sum / n;
  if (successes > 0) {
    r.ttc = success_cost / static_cast<double>(successes);
    r.swc = r.sr * params.c_ref / std::max(*r.ttc, params.c_ref);
  } else {
    r.ttc = std::nullopt;
    r.swc = 0.0;
  }
}

}  // namespace

MetricsReport compute_metrics(const std::vector<Trajectory>& episodes, const CostParams& params) {
  if (episodes.empty()) throw std::invalid_argument("compute_metrics: empty episode list");
  MetricsReport r;
  fill_core(r, episodes, params);
  return r;
}

MetricsReport compute_metrics_with_difficulty(const std::vector<Trajectory>& episodes,
                                              const CostParams& params,
                                              const std::vector<std::string>& difficulty_tags) {
  if (episodes.size() != difficulty_tags.size()) {
    throw std::invalid_argument("compute_metrics: difficulty tags must parallel episodes");
  }
  MetricsReport r = compute_metrics(episodes, params);
  std::map<std::string, std::vector<const Trajectory*>> buckets;
  for (size_t i = 0; i < episodes.size(); ++i) buckets[difficulty_tags[i]].push_back(&episodes[i]);
  for (const auto& [tag, eps] : buckets) {
    MetricsReport::DifficultyRow row;
    row.n_tasks = static_cast<int>(eps.size());
    int successes = 0;
    double cost = 0.0;
    for (const auto* t : eps) {
      if (t->outcome == Outcome::Success) {
        ++successes;
        cost += t->total_cost;
      }
    }
    row.sr = static_cast<double>(successes) / static_cast<double>(eps.size());
    if (successes > 0) row.ttc = cost / static_cast<double>(successes);
    r.per_difficulty[tag] = row;
  }
  return r;
}

namespace {

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

}  // namespace

MetricsReport aggregate_seeds(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate_seeds: no reports");
  MetricsReport out;
  std::vector<double> srs, swcs, lens, ttcs;
  for (const auto& r : reports) {
    srs.push_back(r.sr);
    swcs.push_back(r.swc);
    lens.push_back(r.traj_len_mean);
    if (r.ttc.has_value()) ttcs.push_back(*r.ttc);
    MetricsReport::SeedRow row;
    row.seed = r.seed;
    row.sr = r.sr;
    row.ttc = r.ttc;
    row.swc = r.swc;
    row.traj_len_mean = r.traj_len_mean;
    out.per_seed.push_back(row);
    for (const auto& [k, v] : r.action_histogram) out.action_histogram[k] += v;
    out.n_episodes += r.n_episodes;
  }
  out.sr = mean_of(srs);
  out.swc = mean_of(swcs);  // SwC aggregated as mean of per-seed SwC
  out.traj_len_mean = mean_of(lens);
  if (!ttcs.empty()) out.ttc = mean_of(ttcs);
  out.mean_std["sr_mean"] = out.sr;
  out.mean_std["sr_std"] = sample_std(srs, out.sr);
  out.mean_std["swc_mean"] = out.swc;
  out.mean_std["swc_std"] = sample_std(swcs, out.swc);
  out.mean_std["traj_len_mean"] = out.traj_len_mean;
  out.mean_std["traj_len_std"] = sample_std(lens, out.traj_len_mean);
  if (!ttcs.empty()) {
    out.mean_std["ttc_mean"] = *out.ttc;
    out.mean_std["ttc_std"] = sample_std(ttcs, *out.ttc);
  }
  // merge per-difficulty rows across seeds (task-weighted SR, success-weighted TTC)
  std::map<std::string, std::vector<const MetricsReport::DifficultyRow*>> rows;
  for (const auto& r : reports) {
    for (const auto& [tag, row] : r.per_difficulty) rows[tag].push_back(&row);
  }
  for (const auto& [tag, rs] : rows) {
    MetricsReport::DifficultyRow merged;
    double sr_acc = 0.0, ttc_acc = 0.0;
    int ttc_n = 0;
    for (const auto* row : rs) {
      merged.n_tasks += row->n_tasks;
      sr_acc += row->sr;
      if (row->ttc.has_value()) {
        ttc_acc += *row->ttc;
        ++ttc_n;
      }
    }
    merged.sr = sr_acc / static_cast<double>(rs.size());
    if (ttc_n > 0) merged.ttc = ttc_acc / static_cast<double>(ttc_n);
    out.per_difficulty[tag] = merged;
  }
  return out;
}

namespace {

std::string fmt(double v, int prec = 3) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(prec) << v;
  return ss.str();
}

std::string fmt_opt(const std::optional<double>& v, int prec = 3) {
  return v.has_value() ? fmt(*v, prec) : std::string("-");
}

}  // namespace

std::string metrics_to_text(const MetricsReport& r, const std::string& title) {
  std::ostringstream ss;
  ss << title << "\n";
  ss << std::string(title.size(), '-') << "\n";
  const char* tags[] = {"easy", "medium", "hard"};
  ss << std::left << std::setw(10) << "bin" << std::right << std::setw(8) << "tasks"
     << std::setw(10) << "SR" << std::setw(10) << "TTC" << "\n";
  for (const char* tag : tags) {
    auto it = r.per_difficulty.find(tag);
    if (it == r.per_difficulty.end()) continue;
    ss << std::left << std::setw(10) << tag << std::right << std::setw(8) << it->second.n_tasks
       << std::setw(10) << fmt(it->second.sr) << std::setw(10) << fmt_opt(it->second.ttc) << "\n";
  }
  ss << std::left << std::setw(10) << "avg" << std::right << std::setw(8) << r.n_episodes
     << std::setw(10) << fmt(r.sr) << std::setw(10) << fmt_opt(r.ttc) << "\n";
  ss << "SwC: " << fmt(r.swc) << "   mean traj len: " << fmt(r.traj_len_mean, 2) << "\n";
  if (!r.action_histogram.empty()) {
    ss << "actions:";
    for (const auto& [k, v] : r.action_histogram) ss << " " << k << "=" << v;
    ss << "\n";
  }
  if (!r.per_seed.empty()) {
    ss << "per-seed (seed, SR, TTC, SwC):\n";
    for (const auto& row : r.per_seed) {
      ss << "  " << row.seed << "  " << fmt(row.sr) << "  " << fmt_opt(row.ttc) << "  "
         << fmt(row.swc) << "\n";
    }
  }
  if (!r.mean_std.empty()) {
    ss << "mean/std:";
    for (const auto& [k, v] : r.mean_std) ss << " " << k << "=" << fmt(v, 4);
    ss << "\n";
  }
  ss << "(difficulty bins by candidate count; distractor count = candidates - 1)\n";
  return ss.str();
}

namespace {

json seed_row_to_json(const MetricsReport::SeedRow& row) {
  json j{{"seed", row.seed}, {"sr", row.sr}, {"swc", row.swc},
         {"traj_len_mean", row.traj_len_mean}};
  if (row.ttc.has_value()) j["ttc"] = *row.ttc; else j["ttc"] = nullptr;
  return j;
}

}  // namespace

std::string metrics_to_json_text(const MetricsReport& r) {
  json j;
  j["format_version"] = 1;
  j["sr"] = r.sr;
  if (r.ttc.has_value()) j["ttc"] = *r.ttc; else j["ttc"] = nullptr;
  j["swc"] = r.swc;
  j["traj_len_mean"] = r.traj_len_mean;
  j["n_episodes"] = r.n_episodes;
  j["action_histogram"] = r.action_histogram;
  j["per_seed"] = json::array();
  for (const auto& row : r.per_seed) j["per_seed"].push_back(seed_row_to_json(row));
  j["mean_std"] = r.mean_std;
  j["per_difficulty"] = json::object();
  for (const auto& [tag, row] : r.per_difficulty) {
    json rj{{"n_tasks", row.n_tasks}, {"sr", row.sr}};
    if (row.ttc.has_value()) rj["ttc"] = *row.ttc; else rj["ttc"] = nullptr;
    j["per_difficulty"][tag] = rj;
  }
  return j.dump(2) + "\n";
}

MetricsReport metrics_from_json_text(const std::string& text) {
  json j = json::parse(text);
  MetricsReport r;
  r.sr = j.at("sr").get<double>();
  if (!j.at("ttc").is_null()) r.ttc = j.at("ttc").get<double>();
  r.swc = j.at("swc").get<double>();
  r.traj_len_mean = j.at("traj_len_mean").get<double>();
  r.n_episodes = j.at("n_episodes").get<int>();
  r.action_histogram = j.at("action_histogram").get<std::map<std::string, int>>();
  for (const auto& rowj : j.at("per_seed")) {
    MetricsReport::SeedRow row;
    row.seed = rowj.at("seed").get<uint64_t>();
    row.sr = rowj.at("sr").get<double>();
    if (!rowj.at("ttc").is_null()) row.ttc = rowj.at("ttc").get<double>();
    row.swc = rowj.at("swc").get<double>();
    row.traj_len_mean = rowj.at("traj_len_mean").get<double>();
    r.per_seed.push_back(row);
  }
  r.mean_std = j.at("mean_std").get<std::map<std::string, double>>();
  for (const auto& [tag, rj] : j.at("per_difficulty").items()) {
    MetricsReport::DifficultyRow row;
    row.n_tasks = rj.at("n_tasks").get<int>();
    row.sr = rj.at("sr").get<double>();
    if (!rj.at("ttc").is_null()) row.ttc = rj.at("ttc").get<double>();
    r.per_difficulty[tag] = row;
  }
  return r;
}

}  // namespace asknav
