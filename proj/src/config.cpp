#include "asknav/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace asknav {

namespace fs = std::filesystem;
using nlohmann::json;

EpisodeConfig RunConfig::episode_config() const {
  EpisodeConfig ec;
  ec.cost = cost;
  ec.oracle = oracle;
  ec.horizon = horizon;
  ec.decision_timeout_s = decision_timeout_s;
  return ec;
}

int RunConfig::effective_workers() const {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 4 : static_cast<int>(hc);
}

void apply_preset(RunConfig& config, const std::string& name) {
  config.preset = name;
  if (name == "desk") {
    config.bench = BenchConfig{};  // 40/15 scenes, 400 train tasks, 200 test tasks
    config.cost = CostParams{};
    config.cost.r_success = 5.0;
  } else if (name == "paper") {
    config.bench = BenchConfig{};
    config.bench.n_train_scenes = 80;
    config.bench.n_test_scenes = 30;
    config.bench.train_tasks_per_scene = 10;  // 800 expert traces
    config.bench.n_test_tasks = 330;
    config.cost = CostParams{};  // reference constants, r_success = 1.0
  } else {
    throw std::invalid_argument("unknown preset: " + name + " (expected desk or paper)");
  }
}

namespace {

json bench_to_json(const BenchConfig& c) {
  return json{{"n_train_scenes", c.n_train_scenes},
              {"n_test_scenes", c.n_test_scenes},
              {"train_tasks_per_scene", c.train_tasks_per_scene},
              {"n_test_tasks", c.n_test_tasks},
              {"min_locations", c.min_locations},
              {"max_locations", c.max_locations},
              {"min_filler_objects", c.min_filler_objects},
              {"max_filler_objects", c.max_filler_objects},
              {"candidate_count_weights", c.candidate_count_weights},
              {"unseen_category_fraction", c.unseen_category_fraction},
              {"scene_diameter", c.scene_diameter},
              {"p_cover", c.p_cover},
              {"p_stale", c.p_stale},
              {"master_seed", c.master_seed}};
}

void bench_from_json(const json& j, BenchConfig& c) {
  if (j.contains("n_train_scenes")) c.n_train_scenes = j.at("n_train_scenes").get<int>();
  if (j.contains("n_test_scenes")) c.n_test_scenes = j.at("n_test_scenes").get<int>();
  if (j.contains("train_tasks_per_scene")) {
    c.train_tasks_per_scene = j.at("train_tasks_per_scene").get<int>();
  }
  if (j.contains("n_test_tasks")) c.n_test_tasks = j.at("n_test_tasks").get<int>();
  if (j.contains("min_locations")) c.min_locations = j.at("min_locations").get<int>();
  if (j.contains("max_locations")) c.max_locations = j.at("max_locations").get<int>();
  if (j.contains("min_filler_objects")) c.min_filler_objects = j.at("min_filler_objects").get<int>();
  if (j.contains("max_filler_objects")) c.max_filler_objects = j.at("max_filler_objects").get<int>();
  if (j.contains("candidate_count_weights")) {
    c.candidate_count_weights = j.at("candidate_count_weights").get<std::vector<double>>();
  }
  if (j.contains("unseen_category_fraction")) {
    c.unseen_category_fraction = j.at("unseen_category_fraction").get<double>();
  }
  if (j.contains("scene_diameter")) c.scene_diameter = j.at("scene_diameter").get<double>();
  if (j.contains("p_cover")) c.p_cover = j.at("p_cover").get<double>();
  if (j.contains("p_stale")) c.p_stale = j.at("p_stale").get<double>();
  if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<uint64_t>();
}

json cost_to_json(const CostParams& c) {
  return json{{"c_nav", c.c_nav},       {"c_ask_base", c.c_ask_base}, {"c_mem", c.c_mem},
              {"alpha", c.alpha},       {"lambda", c.lambda},         {"r_success", c.r_success},
              {"r_fail", c.r_fail},     {"c_format", c.c_format},     {"c_ref", c.c_ref}};
}

void cost_from_json(const json& j, CostParams& c) {
  if (j.contains("c_nav")) c.c_nav = j.at("c_nav").get<double>();
  if (j.contains("c_ask_base")) c.c_ask_base = j.at("c_ask_base").get<double>();
  if (j.contains("c_mem")) c.c_mem = j.at("c_mem").get<double>();
  if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
  if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
  if (j.contains("r_success")) c.r_success = j.at("r_success").get<double>();
  if (j.contains("r_fail")) c.r_fail = j.at("r_fail").get<double>();
  if (j.contains("c_format")) c.c_format = j.at("c_format").get<double>();
  if (j.contains("c_ref")) c.c_ref = j.at("c_ref").get<double>();
}

json sft_to_json(const SftConfig& c) {
  return json{{"learning_rate", c.learning_rate},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"warmup_ratio", c.warmup_ratio},
              {"final_lr_ratio", c.final_lr_ratio},
              {"shuffle_seed", c.shuffle_seed}};
}

void sft_from_json(const json& j, SftConfig& c) {
  if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
  if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<int>();
  if (j.contains("warmup_ratio")) c.warmup_ratio = j.at("warmup_ratio").get<double>();
  if (j.contains("final_lr_ratio")) c.final_lr_ratio = j.at("final_lr_ratio").get<double>();
  if (j.contains("shuffle_seed")) c.shuffle_seed = j.at("shuffle_seed").get<uint64_t>();
}

// gamma rides along for the per-step reward decomposition mode; the default
// trajectory return is the undiscounted sum, so it is accepted and unused
json grpo_to_json(const GrpoConfig& c) {
  return json{{"group_size", c.group_size},
              {"learning_rate", c.learning_rate},
              {"clip_epsilon", c.clip_epsilon},
              {"kl_beta", c.kl_beta},
              {"entropy_coef", c.entropy_coef},
              {"advantage_epsilon", c.advantage_epsilon},
              {"epochs", c.epochs},
              {"inner_steps", c.inner_steps},
              {"tasks_per_batch", c.tasks_per_batch},
              {"gamma", c.gamma},
              {"kl_bound", c.kl_bound},
              {"log_ratio_clamp", c.log_ratio_clamp}};
}

void grpo_from_json(const json& j, GrpoConfig& c) {
  if (j.contains("group_size")) c.group_size = j.at("group_size").get<int>();
  if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("clip_epsilon")) c.clip_epsilon = j.at("clip_epsilon").get<double>();
  if (j.contains("kl_beta")) c.kl_beta = j.at("kl_beta").get<double>();
  if (j.contains("entropy_coef")) c.entropy_coef = j.at("entropy_coef").get<double>();
  if (j.contains("advantage_epsilon")) c.advantage_epsilon = j.at("advantage_epsilon").get<double>();
  if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
  if (j.contains("inner_steps")) c.inner_steps = j.at("inner_steps").get<int>();
  if (j.contains("tasks_per_batch")) c.tasks_per_batch = j.at("tasks_per_batch").get<int>();
  if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
  if (j.contains("kl_bound")) c.kl_bound = j.at("kl_bound").get<double>();
  if (j.contains("log_ratio_clamp")) c.log_ratio_clamp = j.at("log_ratio_clamp").get<double>();
}

}  // namespace

std::string run_config_to_text(const RunConfig& c) {
  json j;
  j["format_version"] = 1;
  j["preset"] = c.preset;
  j["benchmark_dir"] = c.benchmark_dir;
  j["out_dir"] = c.out_dir;
  j["bench"] = bench_to_json(c.bench);
  j["cost"] = cost_to_json(c.cost);
  j["oracle"] = json{{"eta", c.oracle.eta}, {"p_floor", c.oracle.p_floor}};
  j["env"] = json{{"horizon", c.horizon}, {"decision_timeout_s", c.decision_timeout_s}};
  j["sft"] = sft_to_json(c.sft);
  j["grpo"] = grpo_to_json(c.grpo);
  j["train_seed"] = c.train_seed;
  j["eval"] = json{{"seeds", c.eval_seeds},
                   {"temperature", c.eval_temperature},
                   {"workers", c.workers}};
  j["policy"] = c.policy;
  j["external"] = json{{"command", c.external_command}, {"timeout_s", c.external_timeout_s}};
  return j.dump(2) + "\n";
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  json j = json::parse(in);

  RunConfig c;
  if (j.contains("preset")) apply_preset(c, j.at("preset").get<std::string>());
  if (j.contains("benchmark_dir")) c.benchmark_dir = j.at("benchmark_dir").get<std::string>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("bench")) bench_from_json(j.at("bench"), c.bench);
  if (j.contains("cost")) cost_from_json(j.at("cost"), c.cost);
  if (j.contains("oracle")) {
    if (j.at("oracle").contains("eta")) c.oracle.eta = j.at("oracle").at("eta").get<double>();
    if (j.at("oracle").contains("p_floor")) {
      c.oracle.p_floor = j.at("oracle").at("p_floor").get<double>();
    }
  }
  if (j.contains("env")) {
    if (j.at("env").contains("horizon")) c.horizon = j.at("env").at("horizon").get<int>();
    if (j.at("env").contains("decision_timeout_s")) {
      c.decision_timeout_s = j.at("env").at("decision_timeout_s").get<double>();
    }
  }
  if (j.contains("sft")) sft_from_json(j.at("sft"), c.sft);
  if (j.contains("grpo")) grpo_from_json(j.at("grpo"), c.grpo);
  if (j.contains("train_seed")) c.train_seed = j.at("train_seed").get<uint64_t>();
  if (j.contains("eval")) {
    const json& e = j.at("eval");
    if (e.contains("seeds")) c.eval_seeds = e.at("seeds").get<std::vector<uint64_t>>();
    if (e.contains("temperature")) c.eval_temperature = e.at("temperature").get<double>();
    if (e.contains("workers")) c.workers = e.at("workers").get<int>();
  }
  if (j.contains("policy")) c.policy = j.at("policy").get<std::string>();
  if (j.contains("external")) {
    const json& e = j.at("external");
    if (e.contains("command")) c.external_command = e.at("command").get<std::vector<std::string>>();
    if (e.contains("timeout_s")) c.external_timeout_s = e.at("timeout_s").get<double>();
  }

  c.cost.validate();
  c.oracle.validate();
  c.bench.validate();
  c.grpo.validate();
  if (c.eval_seeds.empty()) throw std::invalid_argument("config: eval.seeds must be nonempty");
  return c;
}

void save_run_config(const RunConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << run_config_to_text(config);
}

std::string resolve_out_path(const std::string& path) {
  const char* root = std::getenv("ASKNAV_OUT_ROOT");
  if (root == nullptr || root[0] == '\0') return path;
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(root) / p).string();
}

}  // namespace asknav
