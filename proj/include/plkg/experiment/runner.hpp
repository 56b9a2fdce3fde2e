#pragma once

#include <string>
#include <vector>

#include "plkg/experiment/config.hpp"
#include "plkg/sac/trainer.hpp"

namespace plkg::experiment {

// Converged means over the last eval_window episodes, plus fixed-policy
// references on the same channel stream.
struct Summary {
  std::uint64_t seed = 0;
  std::size_t episodes = 0;
  std::string policy;  // "sac", "random" or "oracle-svd"
  double mean_reward = 0.0;
  double mean_rk = 0.0;
  double mean_rd = 0.0;
  double eavesdrop_frac = 0.0;
  double random_reward = 0.0;
  double oracle_reward = 0.0;
  std::size_t clamp_count = 0;

  nlohmann::json to_json() const;
};

Summary summarize(const sac::TrainingLog& log, std::size_t window);

// Trains (or evaluates the configured baseline) and writes resolved_config.json,
// training_log.csv, summary.json and checkpoints into config.output_dir.
// `predictor` may be supplied for partial-predicted mode; otherwise one is
// pretrained inside the run.
Summary run_experiment(ExperimentConfig config, const Predictor* predictor = nullptr);

enum class SweepAxis { lambda_k, n, p, observation_mode };
SweepAxis parse_sweep_axis(std::string_view name);
const char* to_string(SweepAxis axis);

struct SweepRow {
  std::string value;
  double sort_key = 0.0;
  std::size_t replicates = 0;
  double mean_reward = 0.0;
  double mean_rk = 0.0;
  double mean_rd = 0.0;
  double random_reward = 0.0;
  double oracle_reward = 0.0;
  std::string status = "ok";
};

// Runs every value for each replicate seed in its own subdirectory, averages
// the summaries, and writes sweep.csv sorted by axis value. A failing point is
// recorded with its error and the sweep continues.
std::vector<SweepRow> sweep(const ExperimentConfig& base, SweepAxis axis,
                            const std::vector<std::string>& values);

void write_sweep_csv(const std::filesystem::path& path, SweepAxis axis,
                     const std::vector<SweepRow>& rows);

struct PredictTrainResult {
  PredictorMetrics metrics;
  std::filesystem::path checkpoint;
};

// Collects a random-beam rollout, writes dataset.csv, pretrains the predictor
// and writes predictor.ckpt and predictor_metrics.json.
PredictTrainResult predict_train(ExperimentConfig config);

// Pretrains without writing files; shared by run_experiment.
Predictor pretrain_predictor(const ExperimentConfig& resolved, PredictorMetrics* metrics,
                             Rollout* rollout_out = nullptr);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace plkg::experiment
