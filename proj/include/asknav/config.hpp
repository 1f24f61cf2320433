#pragma once

#include <string>
#include <vector>

#include "asknav/benchgen.hpp"
#include "asknav/costs.hpp"
#include "asknav/env.hpp"
#include "asknav/oracle.hpp"
#include "asknav/trainer.hpp"

namespace asknav {

// Resolved settings for a whole pipeline run. Every command stamps the
// resolved config into its output directory so results can be reproduced
// from the artifacts alone.
struct RunConfig {
  std::string preset = "desk";  // desk | paper
  std::string benchmark_dir = "out/bench";
  std::string out_dir = "out/run";

  BenchConfig bench;
  CostParams cost;
  OracleConfig oracle;
  int horizon = 12;
  double decision_timeout_s = 10.0;

  SftConfig sft;
  GrpoConfig grpo;
  uint64_t train_seed = 1;  // master seed for corpus + RL sampling streams

  std::vector<uint64_t> eval_seeds = {1, 2, 3, 4, 5};
  double eval_temperature = 0.5;  // sampling stays at 1.0 during training
  int workers = 0;                // 0: hardware concurrency

  std::string policy = "learned";  // learned | heuristic | random | external
  std::vector<std::string> external_command;
  double external_timeout_s = 10.0;

  EpisodeConfig episode_config() const;
  int effective_workers() const;
};

// The desk preset trains and evaluates in minutes; the paper preset matches
// the reference scale (80/30 scenes, 330 test tasks, 800 expert traces).
// Desk also raises r_success to 5.0: with the default terminal rewards a
// zero-cost wrong declaration would outscore any successful episode whose
// cost exceeds 1.1, and desk-scale costs sit well above that line.
void apply_preset(RunConfig& config, const std::string& name);

RunConfig load_run_config(const std::string& path);
std::string run_config_to_text(const RunConfig& config);
void save_run_config(const RunConfig& config, const std::string& path);

// Output root override: when ASKNAV_OUT_ROOT is set, relative output and
// benchmark paths are resolved under it.
std::string resolve_out_path(const std::string& path);

}  // namespace asknav
