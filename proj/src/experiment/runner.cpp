#include "plkg/experiment/runner.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>

#include "plkg/error.hpp"
#include "plkg/nn/checkpoint.hpp"

namespace plkg::experiment {

using nlohmann::json;

json Summary::to_json() const {
  return {{"seed", seed},
          {"episodes", episodes},
          {"policy", policy},
          {"mean_reward", mean_reward},
          {"mean_rk", mean_rk},
          {"mean_rd", mean_rd},
          {"eavesdrop_frac", eavesdrop_frac},
          {"random_reward", random_reward},
          {"oracle_reward", oracle_reward},
          {"clamp_count", clamp_count}};
}

Summary summarize(const sac::TrainingLog& log, std::size_t window) {
  Summary s;
  s.episodes = log.episodes.size();
  s.mean_reward = log.tail_mean(&sac::EpisodeLog::mean_reward, window);
  s.mean_rk = log.tail_mean(&sac::EpisodeLog::mean_rk, window);
  s.mean_rd = log.tail_mean(&sac::EpisodeLog::mean_rd, window);
  s.eavesdrop_frac = log.tail_mean(&sac::EpisodeLog::eavesdrop_frac, window);
  for (const auto& e : log.episodes) s.clamp_count += e.clamp_count;
  return s;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << doc.dump(2) << '\n';
}

Predictor pretrain_predictor(const ExperimentConfig& c, PredictorMetrics* metrics,
                             Rollout* rollout_out) {
  RngStream init_rng(c.seed, sac::kPredictorStream);
  RngStream channel_rng = init_rng.child(1);
  RngStream policy_rng = init_rng.child(2);
  RngStream train_rng = init_rng.child(3);
  Rollout rollout = collect_rollout(c.env, c.predictor.rollout_slots, channel_rng, policy_rng);
  const PredictorDataset data = build_dataset(rollout, c.predictor, derive_seed(c.seed, 0xDA7A));
  Predictor predictor(c.predictor, init_rng);
  const PredictorMetrics m = train_predictor(predictor, data, train_rng);
  if (metrics) *metrics = m;
  if (rollout_out) *rollout_out = std::move(rollout);
  return predictor;
}

namespace {

json metrics_json(const PredictorMetrics& m) {
  return {{"val_mse", m.val_mse},
          {"val_r2", m.val_r2},
          {"val_accuracy", m.val_accuracy},
          {"base_rate_accuracy", m.base_rate_accuracy},
          {"final_train_loss", m.final_train_loss},
          {"train_size", m.train_size},
          {"val_size", m.val_size}};
}

double reference_reward(const EnvConfig& env_cfg, BaselineKind kind, std::uint64_t seed,
                        std::size_t episodes, std::size_t window) {
  Environment env(env_cfg);
  return sac::run_baseline(env, kind, seed, episodes)
      .tail_mean(&sac::EpisodeLog::mean_reward, window);
}

}  // namespace

Summary run_experiment(ExperimentConfig c, const Predictor* predictor) {
  c.resolve();
  c.env.validate();
  c.sac.validate();
  std::filesystem::create_directories(c.output_dir);
  write_json(c.output_dir / "resolved_config.json", config_to_json(c));

  // Reference policies do not read the observation, so they run in full mode.
  EnvConfig ref_env = c.env;
  ref_env.mode = ObservationMode::full;

  std::optional<Predictor> owned;
  if (c.env.mode == ObservationMode::partial_predicted && !predictor && !c.baseline) {
    PredictorMetrics m;
    owned.emplace(pretrain_predictor(c, &m));
    predictor = &*owned;
    nn::save_checkpoint(c.output_dir / "predictor.ckpt", owned->params());
    write_json(c.output_dir / "predictor_metrics.json", metrics_json(m));
  }

  Summary s;
  sac::TrainingLog log;
  if (c.baseline) {
    Environment env(ref_env);
    log = sac::run_baseline(env, *c.baseline, c.seed, c.episodes);
    s = summarize(log, c.eval_window);
    s.policy = to_string(*c.baseline);
  } else {
    Environment env(c.env, predictor);
    RngStream init_rng(c.seed, sac::kInitStream);
    sac::SacAgent agent(c.env.channel.n, c.sac, init_rng);
    log = sac::train(env, agent, c.seed, c.episodes);
    nn::save_checkpoint(c.output_dir / "agent.ckpt", agent.all_params());
    s = summarize(log, c.eval_window);
    s.policy = "sac";
  }
  s.seed = c.seed;
  s.random_reward = reference_reward(ref_env, BaselineKind::random, c.seed, c.episodes,
                                     c.eval_window);
  s.oracle_reward = reference_reward(ref_env, BaselineKind::oracle_svd, c.seed, c.episodes,
                                     c.eval_window);
  log.write_csv(c.output_dir / "training_log.csv");
  write_json(c.output_dir / "summary.json", s.to_json());
  return s;
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "lambda_k") return SweepAxis::lambda_k;
  if (name == "N") return SweepAxis::n;
  if (name == "P") return SweepAxis::p;
  if (name == "observation_mode") return SweepAxis::observation_mode;
  throw ConfigError("unknown sweep axis '" + std::string(name) +
                    "' (expected lambda_k, N, P or observation_mode)");
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::lambda_k: return "lambda_k";
    case SweepAxis::n: return "N";
    case SweepAxis::p: return "P";
    case SweepAxis::observation_mode: return "observation_mode";
  }
  return "?";
}

namespace {

double parse_number(const std::string& s, const char* axis) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ConfigError(std::string(axis) + ": not a number: '" + s + "'");
  return v;
}

// Sets the axis on a copy of the config and returns the sort key.
double apply_axis(ExperimentConfig& c, SweepAxis axis, const std::string& value) {
  switch (axis) {
    case SweepAxis::lambda_k: {
      const double v = parse_number(value, "lambda_k");
      if (v < 0.0 || v > 1.0) throw ConfigError("lambda_k: out of range, must lie in [0, 1]");
      c.env.lambda_k = v;
      return v;
    }
    case SweepAxis::n: {
      const double v = parse_number(value, "N");
      if (v < 1.0 || v != std::floor(v)) throw ConfigError("N: must be a positive integer");
      c.env.channel.n = static_cast<std::size_t>(v);
      c.tau.reset();  // recalibrated per antenna count
      return v;
    }
    case SweepAxis::p: {
      const double v = parse_number(value, "P");
      if (!(v > 0.0)) throw ConfigError("P: must be > 0");
      c.env.pa = c.env.pb = v;
      c.env.pmax = std::max(c.env.pmax, v);
      return v;
    }
    case SweepAxis::observation_mode: {
      const ObservationMode m = parse_observation_mode(value);
      return static_cast<double>(m);
    }
  }
  return 0.0;
}

}  // namespace

std::vector<SweepRow> sweep(const ExperimentConfig& base, SweepAxis axis,
                            const std::vector<std::string>& values) {
  std::vector<SweepRow> rows;
  for (const auto& value : values) {
    SweepRow row;
    row.value = value;
    row.sort_key = std::numeric_limits<double>::infinity();  // failures sort last
    try {
      ExperimentConfig point = base;
      row.sort_key = apply_axis(point, axis, value);
      if (axis == SweepAxis::observation_mode) point.env.mode = parse_observation_mode(value);
      for (std::uint64_t seed : base.replicate_seeds()) {
        ExperimentConfig rep = point;
        rep.seed = seed;
        rep.seeds.clear();
        rep.output_dir = base.output_dir / (std::string(to_string(axis)) + "=" + value) /
                         ("seed_" + std::to_string(seed));
        const Summary s = run_experiment(rep);
        row.mean_reward += s.mean_reward;
        row.mean_rk += s.mean_rk;
        row.mean_rd += s.mean_rd;
        row.random_reward += s.random_reward;
        row.oracle_reward += s.oracle_reward;
        ++row.replicates;
      }
      const double k = static_cast<double>(row.replicates);
      row.mean_reward /= k;
      row.mean_rk /= k;
      row.mean_rd /= k;
      row.random_reward /= k;
      row.oracle_reward /= k;
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
      std::cerr << "sweep point " << to_string(axis) << "=" << value << " failed: " << e.what()
                << '\n';
    }
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.sort_key < b.sort_key; });
  std::filesystem::create_directories(base.output_dir);
  write_sweep_csv(base.output_dir / "sweep.csv", axis, rows);
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, SweepAxis axis,
                     const std::vector<SweepRow>& rows) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os.precision(17);
  os << to_string(axis)
     << ",replicates,mean_reward,mean_rk,mean_rd,random_reward,oracle_reward,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    os << r.value << ',' << r.replicates << ',' << r.mean_reward << ',' << r.mean_rk << ','
       << r.mean_rd << ',' << r.random_reward << ',' << r.oracle_reward << ',' << status << '\n';
  }
}

PredictTrainResult predict_train(ExperimentConfig c) {
  c.resolve();
  c.env.validate();
  c.predictor.validate();
  std::filesystem::create_directories(c.output_dir);
  write_json(c.output_dir / "resolved_config.json", config_to_json(c));
  PredictTrainResult result;
  Rollout rollout;
  Predictor predictor = pretrain_predictor(c, &result.metrics, &rollout);
  write_rollout_csv(c.output_dir / "dataset.csv", rollout);
  result.checkpoint = c.output_dir / "predictor.ckpt";
  nn::save_checkpoint(result.checkpoint, predictor.params());
  write_json(c.output_dir / "predictor_metrics.json", metrics_json(result.metrics));
  return result;
}

}  // namespace plkg::experiment
