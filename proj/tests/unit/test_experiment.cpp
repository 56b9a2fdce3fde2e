#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "plkg/error.hpp"
#include "plkg/experiment/runner.hpp"

using namespace plkg;
using namespace plkg::experiment;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("plkg_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

ExperimentConfig tiny_run(const std::filesystem::path& out) {
  ExperimentConfig c = config_from_json(json::parse(R"({
    "episodes": 3, "episode_len": 20, "N": 2, "hidden": 8, "batch_size": 8,
    "warmup_steps": 10, "eval_window": 2, "tau": 1.0, "seq_len": 3,
    "lstm_hidden": 4, "pretrain_steps": 20, "predictor_rollout_slots": 60
  })"));
  c.output_dir = out;
  return c;
}

}  // namespace

TEST_CASE("empty config yields documented defaults") {
  const ExperimentConfig c = config_from_json(json::object());
  CHECK(c.env.channel.n == 8);
  CHECK(c.env.pa == 100.0);
  CHECK(c.env.lambda_k == 0.5);
  CHECK(c.env.episode_len == 200);
  CHECK(c.sac.gamma == 0.99);
  CHECK(c.sac.tau_target == 0.005);
  CHECK(c.sac.alpha_init == 0.02);
  CHECK(c.sac.hidden == 512);
  CHECK(c.predictor.hidden == 64);
  CHECK(c.eval_window == 50);
  CHECK_FALSE(c.tau.has_value());
  const json echo = config_to_json(c);
  CHECK(config_to_json(config_from_json(echo)) == echo);
}

TEST_CASE("config errors are reported per field") {
  auto message = [](const char* text) -> std::string {
    try {
      config_from_json(json::parse(text));
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message(R"({"lambda_k": 1.5})").find("lambda_k: out of range") != std::string::npos);
  const std::string multi = message(R"({"lambda_k": "x", "bogus": 1, "N": -2})");
  CHECK(multi.find("lambda_k: expected") != std::string::npos);
  CHECK(multi.find("bogus: unknown key") != std::string::npos);
  CHECK(multi.find("N: expected") != std::string::npos);
  CHECK(message(R"({"observation_mode": "x"})").find("observation_mode") != std::string::npos);
  CHECK(message(R"([1, 2])").find("object") != std::string::npos);

  const auto bad = scratch("bad.json");
  std::ofstream(bad) << "{ not json";
  CHECK_THROWS_AS(load_config(bad), ConfigError);
  std::filesystem::remove(bad);
}

TEST_CASE("full-scale profile") {
  const ExperimentConfig c = full_scale_profile();
  CHECK(c.env.channel.n == 8);
  CHECK(c.sac.gamma == 0.99);
  CHECK(c.sac.tau_target == 0.005);
  CHECK(c.sac.alpha_init == 0.02);
  CHECK(c.sac.hidden == 512);
  CHECK(c.predictor.hidden == 64);
}

TEST_CASE("resolve fills stationary innovation, tau and predictor scale") {
  ExperimentConfig c = config_from_json(json::parse(R"({"N": 4, "rho": 0.8})"));
  c.resolve();
  CHECK(*c.sigma_zeta2 == doctest::Approx(0.36));
  CHECK(*c.tau > 0.0);
  CHECK(c.predictor.input_scale == 10.0);
  const double tau = *c.tau;
  c.resolve();
  CHECK(*c.tau == tau);
}

TEST_CASE("environment overrides") {
  ExperimentConfig c;
  setenv("PLKG_SEED", "1234", 1);
  setenv("PLKG_OUT", "/tmp/somewhere", 1);
  apply_env_overrides(c);
  CHECK(c.seed == 1234);
  CHECK(c.output_dir == "/tmp/somewhere");
  setenv("PLKG_SEED", "12x", 1);
  CHECK_THROWS_AS(apply_env_overrides(c), ConfigError);
  unsetenv("PLKG_SEED");
  unsetenv("PLKG_OUT");
}

TEST_CASE("run writes outputs and is reproducible from the resolved config") {
  const auto out = scratch("run");
  const Summary s = run_experiment(tiny_run(out / "a"));
  for (const char* f : {"resolved_config.json", "training_log.csv", "summary.json", "agent.ckpt"}) {
    CHECK(std::filesystem::exists(out / "a" / f));
  }
  CHECK(s.policy == "sac");
  ExperimentConfig again = load_config(out / "a" / "resolved_config.json");
  again.output_dir = out / "b";
  run_experiment(again);
  CHECK(slurp(out / "a" / "training_log.csv") == slurp(out / "b" / "training_log.csv"));
  CHECK(slurp(out / "a" / "summary.json") == slurp(out / "b" / "summary.json"));
  std::filesystem::remove_all(out);
}

TEST_CASE("baseline-only mode skips training") {
  const auto out = scratch("baseline");
  ExperimentConfig c = tiny_run(out);
  c.baseline = BaselineKind::random;
  const Summary s = run_experiment(c);
  CHECK(s.policy == "random");
  CHECK(s.mean_reward == s.random_reward);
  CHECK_FALSE(std::filesystem::exists(out / "agent.ckpt"));
  CHECK(std::filesystem::exists(out / "summary.json"));
  std::filesystem::remove_all(out);
}

TEST_CASE("sweep merges sorted rows and records failures") {
  const auto out = scratch("sweep");
  ExperimentConfig c = tiny_run(out);
  c.baseline = BaselineKind::random;
  const auto rows = sweep(c, SweepAxis::lambda_k, {"1.0", "0", "0.5", "2"});
  REQUIRE(rows.size() == 4);
  const std::string csv = slurp(out / "sweep.csv");
  CHECK(csv.rfind("lambda_k,replicates,mean_reward", 0) == 0);
  CHECK(rows[0].value == "0");
  CHECK(rows[1].value == "0.5");
  CHECK(rows[2].value == "1.0");
  CHECK(rows[3].status.find("error") == 0);
  CHECK(rows[0].status == "ok");
  CHECK_THROWS_AS(parse_sweep_axis("gamma"), ConfigError);
  std::filesystem::remove_all(out);
}

TEST_CASE("predict-train writes dataset, checkpoint and metrics") {
  const auto out = scratch("predict");
  const PredictTrainResult r = predict_train(tiny_run(out));
  CHECK(std::filesystem::exists(out / "dataset.csv"));
  CHECK(std::filesystem::exists(r.checkpoint));
  CHECK(std::filesystem::exists(out / "predictor_metrics.json"));
  const std::string csv = slurp(out / "dataset.csv");
  CHECK(csv.rfind("slot,af_re,af_im,bf_re,bf_im,hae_re,hae_im,xi\n", 0) == 0);
  std::filesystem::remove_all(out);
}
