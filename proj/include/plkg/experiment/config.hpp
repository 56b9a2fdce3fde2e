#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plkg/baselines.hpp"
#include "plkg/env.hpp"
#include "plkg/predictor.hpp"
#include "plkg/sac/agent.hpp"

namespace plkg::experiment {

// Flat experiment configuration. Channel, SAC and predictor fields map one to
// one onto JSON keys; see README for the key list and defaults.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;  // replicate seeds for sweeps; empty -> {seed}
  std::size_t episodes = 200;
  std::filesystem::path output_dir = "runs/default";
  std::size_t eval_window = 50;
  std::optional<BaselineKind> baseline;  // set -> evaluate a fixed policy, no training

  EnvConfig env;
  std::optional<double> sigma_zeta2;  // unset -> 1 - rho^2
  std::optional<double> tau;          // unset -> calibrated to 50% eavesdropping
  sac::SacConfig sac;
  PredictorConfig predictor;

  // Fills sigma_zeta2, tau and predictor scaling; idempotent.
  void resolve();
  bool resolved() const { return sigma_zeta2.has_value() && tau.has_value(); }
  std::vector<std::uint64_t> replicate_seeds() const;
};

// Parses a JSON object; unknown keys, wrong types and range violations are
// reported together in a single ConfigError, one line per field.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

// N=8, gamma=0.99, tau_target=0.005, alpha=0.02, lr=1e-4, hidden 512,
// lstm_hidden 64, P=100.
ExperimentConfig full_scale_profile();

// Applies PLKG_SEED / PLKG_OUT when set. CLI flags are applied afterwards.
void apply_env_overrides(ExperimentConfig& config);

}  // namespace plkg::experiment
