#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "plkg/error.hpp"
#include "plkg/experiment/runner.hpp"

namespace ex = plkg::experiment;

namespace {

ex::ExperimentConfig load_with_overrides(const std::string& config_path,
                                         const std::optional<std::uint64_t>& seed,
                                         const std::optional<std::string>& out) {
  ex::ExperimentConfig c =
      config_path.empty() ? ex::ExperimentConfig{} : ex::load_config(config_path);
  ex::apply_env_overrides(c);
  if (seed) c.seed = *seed;
  if (out) c.output_dir = *out;
  return c;
}

void print_summary(const ex::Summary& s) { std::cout << s.to_json().dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PLKG beamforming experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  auto add_common = [&](CLI::App* cmd, bool config_required) {
    auto* opt = cmd->add_option("--config", config_path, "JSON config file");
    if (config_required) opt->required();
    cmd->add_option("--seed", seed, "experiment seed (overrides PLKG_SEED and config)");
    cmd->add_option("--out", out, "output directory (overrides PLKG_OUT and config)");
  };

  auto* run = app.add_subcommand("run", "train SAC (or the configured baseline)");
  add_common(run, true);

  std::string axis;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "run one experiment per axis value");
  add_common(sweep, false);
  sweep->add_option("--axis", axis, "lambda_k, N, P or observation_mode")->required();
  sweep->add_option("--values", values, "axis values (space or comma separated)")
      ->required()
      ->delimiter(',');

  std::string kind;
  auto* baseline = app.add_subcommand("baseline", "evaluate a fixed reference policy");
  add_common(baseline, false);
  baseline->add_option("--kind", kind, "random or oracle-svd")->required();

  auto* predict = app.add_subcommand("predict-train", "pretrain the eavesdropper predictor");
  add_common(predict, true);

  CLI11_PARSE(app, argc, argv);

  try {
    ex::ExperimentConfig c = load_with_overrides(config_path, seed, out);
    if (run->parsed()) {
      print_summary(ex::run_experiment(c));
    } else if (sweep->parsed()) {
      const auto rows = ex::sweep(c, ex::parse_sweep_axis(axis), values);
      std::cout << "wrote " << (c.output_dir / "sweep.csv").string() << '\n';
      for (const auto& r : rows) {
        if (r.status != "ok") return 2;
      }
    } else if (baseline->parsed()) {
      c.baseline = plkg::parse_baseline_kind(kind);
      print_summary(ex::run_experiment(c));
    } else if (predict->parsed()) {
      const auto r = ex::predict_train(c);
      std::cout << "val_accuracy " << r.metrics.val_accuracy << "  val_r2 " << r.metrics.val_r2
                << "  checkpoint " << r.checkpoint.string() << '\n';
    }
  } catch (const plkg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
