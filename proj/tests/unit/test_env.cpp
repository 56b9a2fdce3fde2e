#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "plkg/baselines.hpp"
#include "plkg/env.hpp"
#include "plkg/error.hpp"

using namespace plkg;

namespace {

EnvConfig small_env(std::size_t n = 4) {
  EnvConfig c;
  c.channel = ChannelParams::stationary(n, 0.9);
  c.channel.tau = calibrate_tau(n, 0.5, 50000);
  c.episode_len = 10;
  return c;
}

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

}  // namespace

TEST_CASE("project_action cases") {
  std::vector<double> raw(8, 0.0);
  raw[0] = 1.0;
  const CVec e1 = project_action(raw);
  CHECK(e1[0] == cd(1.0, 0.0));
  for (std::size_t i = 1; i < 4; ++i) CHECK(e1[i] == cd(0.0, 0.0));
  const CVec uni = project_action(std::vector<double>(8, 0.0));
  for (const auto& x : uni) CHECK(x == cd(0.5, 0.0));
  RngStream rng(1, 0);
  for (int k = 0; k < 10000; ++k) {
    std::vector<double> r(2 + 2 * rng.index(8));
    for (auto& x : r) x = rng.uniform(-1.0, 1.0);
    REQUIRE(std::abs(norm(project_action(r)) - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(project_action(std::vector<double>(3, 1.0)), ShapeError);
  CHECK_THROWS_AS(project_joint_action(std::vector<double>(7, 1.0), 2), ShapeError);
}

TEST_CASE("reset determinism, dimension and mode flag") {
  const EnvConfig cfg = small_env();
  Environment a(cfg), b(cfg);
  RngStream ra(3, 1), rb(3, 1);
  const Observation oa = a.reset(ra);
  CHECK(oa == b.reset(rb));
  CHECK(oa.values.size() == 5);
  CHECK(oa.values[4] == (a.channel().xi == EveMode::eavesdropping ? 1.0 : 0.0));
}

TEST_CASE("observation modes") {
  const EnvConfig cfg = small_env();
  RngStream rng(4, 1);
  const ChannelState s = init_channels(cfg.channel, rng);
  const BeamPair beams = random_action(4, rng);
  const auto eq = equivalent_channels(s, beams, cfg.pa);
  const Observation full =
      assemble_observation(s, beams, cfg.pa, ObservationMode::full, nullptr, {});
  CHECK(full.values[0] == eq.ab.real());
  CHECK(full.values[1] == eq.ab.imag());
  CHECK(full.values[2] == eq.ae.real());
  CHECK(full.values[3] == eq.ae.imag());
  const Observation naive =
      assemble_observation(s, beams, cfg.pa, ObservationMode::partial_naive, nullptr, {});
  CHECK(naive.values[0] == eq.ab.real());
  CHECK(naive.values[2] == 0.0);
  CHECK(naive.values[3] == 0.0);
  CHECK_THROWS_AS(
      assemble_observation(s, beams, cfg.pa, ObservationMode::partial_predicted, nullptr, {}),
      ConfigError);
  EnvConfig pp = cfg;
  pp.mode = ObservationMode::partial_predicted;
  CHECK_THROWS_AS(Environment{pp}, ConfigError);
  CHECK(parse_observation_mode("partial-naive") == ObservationMode::partial_naive);
  CHECK_THROWS_AS(parse_observation_mode("partial"), ConfigError);
}

TEST_CASE("step reward endpoint and episode length") {
  EnvConfig cfg = small_env();
  cfg.lambda_k = 0.0;
  Environment env(cfg);
  RngStream rng(5, 1);
  env.reset(rng);
  const ChannelState before = env.channel();
  const BeamPair beams = oracle_action(before.h_ab);
  const StepResult r = env.step_beams(beams, rng);
  const RateInputs in = instantaneous_gains(before, beams, cfg.pa, cfg.rate_context());
  CHECK(r.reward == rd(in));
  CHECK(r.reward == r.report.rd);
  int steps = 1;
  bool done = r.done;
  while (!done) {
    done = env.step(std::vector<double>(16, 0.1), rng).done;
    ++steps;
  }
  CHECK(steps == 10);
  CHECK_THROWS_AS(env.step(std::vector<double>(16, 0.1), rng), ContractError);
}

TEST_CASE("reward decomposition and feasibility over a rollout") {
  const EnvConfig cfg = small_env();
  Environment env(cfg);
  RngStream rng(6, 1), pol(6, 2);
  env.reset(rng);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> a(16);
    for (auto& x : a) x = pol.uniform(-1.0, 1.0);
    const StepResult r = env.step(a, rng);
    CHECK(std::abs(norm(env.beams().w_a) - 1.0) <= 1e-9);
    CHECK(std::abs(norm(env.beams().w_b) - 1.0) <= 1e-9);
    CHECK(r.reward == cfg.lambda_k * r.report.key + (1.0 - cfg.lambda_k) * r.report.rd);
  }
}

TEST_CASE("eavesdropping fraction tracks the calibrated target") {
  EnvConfig cfg = small_env(8);
  cfg.channel.tau = calibrate_tau(8);
  cfg.episode_len = 2000;
  Environment env(cfg);
  RngStream rng(7, 1);
  std::size_t listening = 0, total = 0;
  for (int ep = 0; ep < 10; ++ep) {
    env.reset(rng);
    bool done = false;
    while (!done) {
      const StepResult r = env.step_beams(BeamPair::uniform(8), rng);
      listening += r.report.xi == EveMode::eavesdropping;
      ++total;
      done = r.done;
    }
  }
  CHECK(static_cast<double>(listening) / total == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("seeded five-step rollout matches the golden file") {
  EnvConfig cfg;
  cfg.channel = ChannelParams::stationary(2, 0.9);
  cfg.channel.tau = 1.0;
  cfg.episode_len = 5;
  Environment env(cfg);
  RngStream rng(2024, 1);
  env.reset(rng);
  std::ostringstream got;
  const std::vector<std::vector<double>> actions{
      {1, 0, 0, 0, 1, 0, 0, 0},         {0.5, -0.5, 0.2, 0.1, 0, 1, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 0},         {-0.3, 0.9, 0.4, -0.8, 0.7, 0.7, -0.1, 0.2},
      {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}};
  for (const auto& a : actions) {
    const StepResult r = env.step(a, rng);
    got << hex(r.reward) << ' ' << hex(r.report.rks) << ' ' << hex(r.report.rd) << ' '
        << static_cast<int>(r.report.xi == EveMode::eavesdropping) << '\n';
  }
  const std::string path = std::string(PLKG_TEST_DATA_DIR) + "/env_golden.txt";
  if (std::getenv("PLKG_REGENERATE_GOLDEN")) {
    std::ofstream(path) << got.str();
  }
  std::ifstream is(path);
  REQUIRE_MESSAGE(is.good(), "missing golden file " << path);
  std::stringstream want;
  want << is.rdbuf();
  CHECK(got.str() == want.str());
}

TEST_CASE("baselines") {
  RngStream rng(8, 0);
  const BeamPair r = random_action(6, rng);
  CHECK(std::abs(norm(r.w_a) - 1.0) <= 1e-12);
  CHECK(std::abs(norm(r.w_b) - 1.0) <= 1e-12);
  RngStream r1(9, 0), r2(9, 0);
  CHECK(random_action(6, r1).w_a == random_action(6, r2).w_a);

  const CVec d{0.5, 3.0, 1.0};
  const BeamPair o = oracle_action(CMat::diagonal(d));
  CHECK(std::abs(o.w_a[1]) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(o.w_b[1]) == doctest::Approx(1.0).epsilon(1e-9));

  // Mean random gain identity: E|w_b^H H w_a|^2 = ||H||_F^2 / N^2.
  const CMat h = cgauss_matrix(4, 1.0, rng);
  double frob = 0.0;
  for (const auto& x : h.data()) frob += std::norm(x);
  double acc = 0.0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    const BeamPair b = random_action(4, rng);
    acc += std::norm(bilinear_form(b.w_b, h, b.w_a));
  }
  CHECK(acc / draws == doctest::Approx(frob / 16.0).epsilon(0.03));

  for (int k = 0; k < 200; ++k) {
    const CMat g = cgauss_matrix(4, 1.0, rng);
    const BeamPair best = oracle_action(g);
    const BeamPair any = random_action(4, rng);
    CHECK(std::norm(bilinear_form(best.w_b, g, best.w_a)) >=
          std::norm(bilinear_form(any.w_b, g, any.w_a)));
    RateInputs in;
    in.omega_a0 = 100.0 * std::norm(bilinear_form(best.w_b, g, best.w_a));
    in.sigma2 = 1.19;
    const double sigma_max = power_iteration_top_pair(g, rng).sigma;
    CHECK(std::abs(rd(in) - std::log2(1.0 + 100.0 * sigma_max * sigma_max / 1.19)) <= 1e-9);
  }
  CHECK(parse_baseline_kind("oracle-svd") == BaselineKind::oracle_svd);
  CHECK_THROWS(parse_baseline_kind("svd"));
}
