#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "asknav/benchgen.hpp"
#include "asknav/config.hpp"
#include "asknav/eval.hpp"
#include "asknav/external_policy.hpp"
#include "asknav/planner.hpp"
#include "asknav/policy.hpp"
#include "asknav/trainer.hpp"
#include "asknav/trajlog.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace asknav;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CliOptions {
  std::string config_path;
  std::string preset = "desk";
  std::string out_override;
  std::string policy_override;
  std::vector<uint64_t> seeds_override;
  int workers_override = -1;
  std::string checkpoint;
  std::string sft_checkpoint;
  std::string task_id;
  bool allow_pipe = false;
};

RunConfig resolve_config(const CliOptions& opt) {
  RunConfig config;
  if (!opt.config_path.empty()) {
    config = load_run_config(opt.config_path);
  } else {
    apply_preset(config, opt.preset);
  }
  if (!opt.out_override.empty()) {
    if (config.benchmark_dir == RunConfig{}.benchmark_dir) {
      config.benchmark_dir = (fs::path(opt.out_override) / "bench").string();
    }
    config.out_dir = opt.out_override;
  }
  if (!opt.policy_override.empty()) config.policy = opt.policy_override;
  if (!opt.seeds_override.empty()) config.eval_seeds = opt.seeds_override;
  if (opt.workers_override > 0) config.workers = opt.workers_override;
  config.benchmark_dir = resolve_out_path(config.benchmark_dir);
  config.out_dir = resolve_out_path(config.out_dir);
  return config;
}

void stamp_config(const RunConfig& config, const std::string& dir) {
  fs::create_directories(dir);
  save_run_config(config, (fs::path(dir) / "resolved_config.json").string());
}

std::string corpus_path(const RunConfig& c) {
  return (fs::path(c.out_dir) / "corpus" / "expert_traces.jsonl").string();
}

std::string sft_path(const RunConfig& c) {
  return (fs::path(c.out_dir) / "checkpoints" / "sft.json").string();
}

std::string rl_path(const RunConfig& c, uint64_t seed) {
  return (fs::path(c.out_dir) / "checkpoints" / ("rl_seed" + std::to_string(seed) + ".json"))
      .string();
}

PolicyFactory factory_for(const RunConfig& config, const std::string& name,
                          const PolicyParams* params) {
  if (name == "heuristic") {
    return []() { return std::make_unique<HeuristicAskThenExplore>(); };
  }
  if (name == "random") {
    return []() { return std::make_unique<RandomPolicy>(); };
  }
  if (name == "external") {
    if (config.external_command.empty()) {
      throw std::invalid_argument("policy=external requires external.command in the config");
    }
    auto cmd = config.external_command;
    auto timeout = config.external_timeout_s;
    return [cmd, timeout]() {
      return std::make_unique<SubprocessPolicy>(cmd, "external episode", timeout);
    };
  }
  if (name == "learned") {
    if (params == nullptr) throw std::invalid_argument("learned policy needs a checkpoint");
    PolicyParams p = *params;
    return [p]() { return std::make_unique<SoftmaxPolicy>(p); };
  }
  throw std::invalid_argument("unknown policy: " + name);
}

void write_eval_outputs(const std::string& dir, const EvalResult& result,
                        const std::string& title) {
  fs::create_directories(dir);
  for (size_t si = 0; si < result.per_seed.size(); ++si) {
    const std::string path =
        (fs::path(dir) / ("trajectories_seed" + std::to_string(result.per_seed[si].seed) + ".jsonl"))
            .string();
    std::ofstream reset(path, std::ios::trunc);
    reset.close();
    append_trajectories(path, result.trajectories[si]);
  }
  std::ofstream jf(fs::path(dir) / "report.json");
  jf << metrics_to_json_text(result.aggregate);
  std::ofstream tf(fs::path(dir) / "report.txt");
  tf << metrics_to_text(result.aggregate, title);
  std::cout << metrics_to_text(result.aggregate, title);
}

int cmd_gen(const RunConfig& config) {
  Benchmark bench = build_benchmark(config.bench);
  save_benchmark(bench, config.benchmark_dir);
  stamp_config(config, config.benchmark_dir);
  std::cout << "benchmark: " << bench.train_tasks.size() << " train tasks over "
            << bench.train_scene_ids.size() << " scenes, " << bench.test_tasks.size()
            << " test tasks over " << bench.test_scene_ids.size() << " scenes -> "
            << config.benchmark_dir << "\n";
  return kExitOk;
}

int cmd_expert(const RunConfig& config) {
  Benchmark bench = load_benchmark(config.benchmark_dir);
  PlannerConfig pc{config.cost, config.oracle, config.horizon};
  CorpusResult corpus = generate_sft_corpus(bench.train_tasks, bench.scenes, pc,
                                            config.train_seed, config.effective_workers());
  fs::create_directories(fs::path(config.out_dir) / "corpus");
  save_corpus(corpus_path(config), corpus.traces);
  nlohmann::json stats{{"n_tasks", bench.train_tasks.size()},
                       {"n_traces", corpus.traces.size()},
                       {"dropped", corpus.dropped}};
  std::ofstream sf(fs::path(config.out_dir) / "corpus" / "corpus_stats.json");
  sf << stats.dump(2) << "\n";
  stamp_config(config, (fs::path(config.out_dir) / "corpus").string());
  std::cout << "expert corpus: " << corpus.traces.size() << " traces (" << corpus.dropped
            << " dropped) -> " << corpus_path(config) << "\n";
  return kExitOk;
}

int cmd_sft(const RunConfig& config) {
  if (!fs::exists(corpus_path(config))) {
    std::cerr << "missing expert corpus at " << corpus_path(config)
              << "; run `asknav expert` first\n";
    return kExitConfigError;
  }
  const auto corpus = load_corpus(corpus_path(config));
  SftResult result = sft_fit(corpus, PolicyParams::zeros(), config.sft);
  fs::create_directories(fs::path(config.out_dir) / "checkpoints");
  nlohmann::json extra{{"final_loss", result.final_loss},
                       {"n_traces", corpus.size()},
                       {"loss_first", result.loss_curve.empty() ? 0.0 : result.loss_curve.front()},
                       {"loss_last", result.loss_curve.empty() ? 0.0 : result.loss_curve.back()}};
  save_params(result.params, sft_path(config), extra.dump());
  stamp_config(config, (fs::path(config.out_dir) / "checkpoints").string());
  std::cout << "sft checkpoint: final loss " << result.final_loss << " -> " << sft_path(config)
            << "\n";
  return kExitOk;
}

int cmd_rl(const RunConfig& config) {
  if (!fs::exists(sft_path(config))) {
    std::cerr << "missing SFT checkpoint at " << sft_path(config) << "; run `asknav sft` first\n";
    return kExitConfigError;
  }
  Benchmark bench = load_benchmark(config.benchmark_dir);
  const PolicyParams sft_params = load_params(sft_path(config));
  for (uint64_t seed : config.eval_seeds) {
    TrainResult result =
        train_hc_grpo(bench.train_tasks, bench.scenes, sft_params, config.episode_config(),
                      config.grpo, derive_seed(config.train_seed, seed),
                      config.effective_workers());
    nlohmann::json extra{{"seed", seed},
                         {"final_mean_kl", result.final_mean_kl},
                         {"curve", nlohmann::json::parse(curve_to_json_text(result.curve))}};
    save_params(result.params, rl_path(config, seed), extra.dump());
    std::ofstream cf(fs::path(config.out_dir) / "checkpoints" /
                     ("rl_seed" + std::to_string(seed) + "_curve.txt"));
    cf << curve_to_table(result.curve);
    std::cout << "rl checkpoint seed " << seed << ": mean return "
              << (result.curve.empty() ? 0.0 : result.curve.back().mean_return) << ", KL "
              << result.final_mean_kl << " -> " << rl_path(config, seed) << "\n";
  }
  stamp_config(config, (fs::path(config.out_dir) / "checkpoints").string());
  return kExitOk;
}

int cmd_eval(const RunConfig& config, const CliOptions& opt) {
  Benchmark bench = load_benchmark(config.benchmark_dir);
  PolicyParams params;
  const PolicyParams* params_ptr = nullptr;
  if (config.policy == "learned") {
    std::string path = opt.checkpoint;
    if (path.empty()) path = rl_path(config, config.eval_seeds.front());
    if (!fs::exists(path)) {
      std::cerr << "missing checkpoint " << path
                << "; run `asknav rl` first or pass --checkpoint\n";
      return kExitConfigError;
    }
    params = load_params(path);
    params.temperature = config.eval_temperature;
    params_ptr = &params;
  }
  EpisodeConfig ec = config.episode_config();
  EvalResult result = evaluate_policy(factory_for(config, config.policy, params_ptr),
                                      bench.test_tasks, bench.scenes, ec, config.eval_seeds,
                                      config.effective_workers());
  const std::string dir = (fs::path(config.out_dir) / "eval" / config.policy).string();
  write_eval_outputs(dir, result, "evaluation: " + config.policy);
  stamp_config(config, dir);
  return kExitOk;
}

int cmd_ablate(const RunConfig& config, const CliOptions& opt) {
  Benchmark bench = load_benchmark(config.benchmark_dir);
  std::string rl =
      opt.checkpoint.empty() ? rl_path(config, config.eval_seeds.front()) : opt.checkpoint;
  std::string sft = opt.sft_checkpoint.empty() ? sft_path(config) : opt.sft_checkpoint;
  if (!fs::exists(rl)) {
    std::cerr << "missing RL checkpoint " << rl << "; run `asknav rl` first\n";
    return kExitConfigError;
  }
  if (!fs::exists(sft)) {
    std::cerr << "missing SFT checkpoint " << sft << "; run `asknav sft` first\n";
    return kExitConfigError;
  }
  PolicyParams rl_params = load_params(rl);
  PolicyParams sft_params = load_params(sft);
  rl_params.temperature = config.eval_temperature;
  sft_params.temperature = config.eval_temperature;

  struct Row {
    std::string name;
    const PolicyParams* params;
    bool mask_ask;
    bool mask_memory;
  };
  const Row rows[] = {{"full", &rl_params, false, false},
                      {"no_dialogue", &rl_params, true, false},
                      {"no_memory", &rl_params, false, true},
                      {"sft_only", &sft_params, false, false}};

  nlohmann::json table = nlohmann::json::array();
  std::cout << "ablation (SR / TTC / SwC):\n";
  for (const Row& row : rows) {
    EpisodeConfig ec = config.episode_config();
    ec.mask_ask = row.mask_ask;
    ec.mask_memory = row.mask_memory;
    EvalResult result =
        evaluate_policy(factory_for(config, "learned", row.params), bench.test_tasks,
                        bench.scenes, ec, config.eval_seeds, config.effective_workers());
    const std::string dir = (fs::path(config.out_dir) / "ablation" / row.name).string();
    write_eval_outputs(dir, result, "ablation: " + row.name);
    nlohmann::json rj{{"name", row.name},
                      {"sr", result.aggregate.sr},
                      {"swc", result.aggregate.swc}};
    if (result.aggregate.ttc.has_value()) {
      rj["ttc"] = *result.aggregate.ttc;
    } else {
      rj["ttc"] = nullptr;
    }
    table.push_back(rj);
  }
  fs::create_directories(fs::path(config.out_dir) / "ablation");
  std::ofstream jf(fs::path(config.out_dir) / "ablation" / "ablation.json");
  jf << nlohmann::json{{"format_version", 1}, {"rows", table}}.dump(2) << "\n";
  stamp_config(config, (fs::path(config.out_dir) / "ablation").string());
  return kExitOk;
}

int cmd_report(const RunConfig& config) {
  // rebuild every report from the persisted trajectory logs alone
  Benchmark bench = load_benchmark(config.benchmark_dir);
  bool any = false;
  for (const auto& entry : fs::recursive_directory_iterator(config.out_dir)) {
    if (!entry.is_directory()) continue;
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(entry.path())) {
      const std::string name = f.path().filename().string();
      if (name.rfind("trajectories_seed", 0) == 0) files.push_back(f.path());
    }
    if (files.empty()) continue;
    std::sort(files.begin(), files.end());
    std::vector<std::vector<Trajectory>> per_seed;
    std::vector<uint64_t> seeds;
    for (const auto& f : files) {
      per_seed.push_back(load_trajectories(f.string()));
      const std::string name = f.filename().string();
      seeds.push_back(std::stoull(name.substr(17, name.size() - 17 - 6)));
    }
    // the log order matches the benchmark's test task order
    EvalResult result = reports_from_trajectories(per_seed, bench.test_tasks, config.cost, seeds);
    std::ofstream jf(entry.path() / "report.json");
    jf << metrics_to_json_text(result.aggregate);
    std::ofstream tf(entry.path() / "report.txt");
    tf << metrics_to_text(result.aggregate, "recomputed: " + entry.path().string());
    std::cout << "recomputed report for " << entry.path().string() << "\n";
    any = true;
  }
  if (!any) {
    std::cerr << "no trajectory logs under " << config.out_dir << "; run `asknav eval` first\n";
    return kExitConfigError;
  }
  return kExitOk;
}

int cmd_play(const RunConfig& config, const CliOptions& opt) {
  if (!opt.allow_pipe && !isatty(STDIN_FILENO)) {
    std::cerr << "play needs an interactive terminal (or --allow-pipe for scripted input)\n";
    return kExitConfigError;
  }
  Benchmark bench = load_benchmark(config.benchmark_dir);
  const Task* task = nullptr;
  if (opt.task_id.empty()) {
    task = &bench.test_tasks.front();
  } else {
    for (const auto& t : bench.test_tasks) {
      if (t.task_id == opt.task_id) task = &t;
    }
    for (const auto& t : bench.train_tasks) {
      if (t.task_id == opt.task_id) task = &t;
    }
    if (task == nullptr) {
      std::cerr << "unknown task id " << opt.task_id << "\n";
      return kExitConfigError;
    }
  }
  const SceneGraph& scene = bench.scenes.at(task->scene_id);

  std::unique_ptr<Policy> policy;
  PolicyParams params;
  if (config.policy == "learned") {
    std::string path =
        opt.checkpoint.empty() ? rl_path(config, config.eval_seeds.front()) : opt.checkpoint;
    if (!fs::exists(path)) {
      std::cerr << "missing checkpoint " << path << "\n";
      return kExitConfigError;
    }
    params = load_params(path);
    params.temperature = config.eval_temperature;
    policy = std::make_unique<SoftmaxPolicy>(params);
  } else if (config.policy == "random") {
    policy = std::make_unique<RandomPolicy>();
  } else {
    policy = std::make_unique<HeuristicAskThenExplore>();
  }

  std::cout << "task " << task->task_id << ": " << task->instruction << "\n" << "candidates:";
  for (const auto& id : task->candidate_ids) std::cout << " " << id;
  std::cout << "\nyou are the respondent; answer asks with \"kind=value\" or \"pass\".\n\n";

  Episode ep(scene, *task, config.episode_config(), config.eval_seeds.front());
  ep.set_ask_handler([&](const OracleQuery& q, const std::vector<std::string>& remaining) {
    return interactive_answer(q, remaining, std::cin, std::cout);
  });
  Rng rng(derive_seed(config.eval_seeds.front(), 0x9EEDULL));
  policy->begin_episode();
  double total = 0.0;
  std::vector<StepRecord> steps;
  while (!ep.done()) {
    const auto mask = ep.valid_mask();
    DecisionContext ctx{ep.observation(), mask};
    ActionChoice choice = policy->decide(ctx, rng);
    StepResult sr = ep.step(choice.action);
    total += sr.cost;
    StepRecord rec;
    rec.action = choice.action;
    rec.cost = sr.cost;
    rec.log_prob = choice.log_prob;
    steps.push_back(rec);
    std::cout << "-> " << describe(choice.action) << "  cost=" << sr.cost
              << "  remaining=" << sr.observation.belief.n_remaining << "\n";
  }
  Trajectory traj;
  traj.task_id = task->task_id;
  traj.steps = steps;
  traj.outcome = ep.outcome();
  traj.total_cost = total;
  traj.return_value = trajectory_return(traj, config.cost);
  std::cout << "\noutcome: " << to_string(ep.outcome()) << "  total cost: " << total
            << "  return: " << traj.return_value << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cost-aware interactive search benchmark and trainer"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "run config JSON");
  app.add_option("--preset", opt.preset, "desk or paper (when no --config)")
      ->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--out", opt.out_override, "output directory override");
  app.add_option("--policy", opt.policy_override, "learned | heuristic | random | external");
  app.add_option("--seeds", opt.seeds_override, "evaluation / training seeds");
  app.add_option("--workers", opt.workers_override, "worker thread count");
  app.add_option("--checkpoint", opt.checkpoint, "policy checkpoint path");
  app.add_option("--sft-checkpoint", opt.sft_checkpoint, "SFT checkpoint path (ablate)");
  app.add_option("--task", opt.task_id, "task id (play)");
  app.add_flag("--allow-pipe", opt.allow_pipe, "allow non-tty stdin for play");

  auto* gen = app.add_subcommand("gen", "generate the benchmark");
  auto* expert = app.add_subcommand("expert", "generate expert demonstration traces");
  auto* sft = app.add_subcommand("sft", "supervised warm-start from the expert corpus");
  auto* rl = app.add_subcommand("rl", "online optimization from the SFT checkpoint");
  auto* eval = app.add_subcommand("eval", "evaluate a policy on the test split");
  auto* ablate = app.add_subcommand("ablate", "ablation table for a trained checkpoint");
  auto* report = app.add_subcommand("report", "recompute reports from trajectory logs");
  auto* play = app.add_subcommand("play", "interactive episode with a human respondent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfigError;
  }

  try {
    const RunConfig config = resolve_config(opt);
    if (gen->parsed()) return cmd_gen(config);
    if (expert->parsed()) return cmd_expert(config);
    if (sft->parsed()) return cmd_sft(config);
    if (rl->parsed()) return cmd_rl(config);
    if (eval->parsed()) return cmd_eval(config, opt);
    if (ablate->parsed()) return cmd_ablate(config, opt);
    if (report->parsed()) return cmd_report(config);
    if (play->parsed()) return cmd_play(config, opt);
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}
