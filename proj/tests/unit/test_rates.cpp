#include <doctest.h>

#include <cmath>

#include "plkg/error.hpp"
#include "plkg/rates.hpp"

using namespace plkg;

namespace {

RateInputs example() {
  RateInputs in;
  in.omega_a0 = 1.0;
  in.omega_e0 = 0.5;
  in.omega_ae0 = 0.3;
  in.sigma2 = 0.1;
  in.sigma_z2 = 0.05;
  in.rho = 0.9;
  in.delta = 1;
  in.bandwidth = 1.0;
  in.lambda_k = 0.5;
  return in;
}

// Random inputs satisfying the Cauchy-Schwarz constraint.
RateInputs random_inputs(RngStream& rng) {
  RateInputs in;
  in.omega_a0 = rng.uniform(0.0, 20.0);
  in.omega_e0 = rng.uniform(0.0, 20.0);
  const double mag = std::sqrt(in.omega_a0 * in.omega_e0) * rng.uniform();
  in.omega_ae0 = std::polar(mag, rng.uniform(0.0, 6.283));
  in.sigma_z2 = rng.uniform(0.01, 2.0);
  in.sigma2 = in.sigma_z2 + rng.uniform(0.0, 2.0);
  in.rho = rng.uniform(0.0, 0.999);
  in.delta = 1 + static_cast<int>(rng.index(5));
  return in;
}

}  // namespace

TEST_CASE("instantaneous_gains aligned, nulled and recomputed") {
  ChannelParams p = ChannelParams::stationary(3, 0.9);
  RngStream rng(1, 0);
  ChannelState s = init_channels(p, rng);
  s.h_ab = CMat::identity(3);
  s.h_ae = CVec{1.0, 0.0, 0.0};
  const BeamPair e1{CVec{1.0, 0.0, 0.0}, CVec{1.0, 0.0, 0.0}};
  RateContext ctx;
  RateInputs in = instantaneous_gains(s, e1, 1.0, ctx);
  CHECK(in.omega_a0 == 1.0);
  CHECK(in.omega_e0 == 1.0);
  CHECK(in.omega_ae0 == cd(1.0, 0.0));

  s.h_ae = CVec{0.0, 2.0, 0.0};
  in = instantaneous_gains(s, e1, 1.0, ctx);
  CHECK(in.omega_e0 == 0.0);
  CHECK(in.omega_ae0 == cd(0.0, 0.0));

  ChannelState r = init_channels(p, rng);
  CVec wa = cgauss_vector(3, 1.0, rng), wb = cgauss_vector(3, 1.0, rng);
  const double na = norm(wa), nb = norm(wb);
  for (auto& x : wa) x /= na;
  for (auto& x : wb) x /= nb;
  in = instantaneous_gains(r, {wa, wb}, 5.0, ctx);
  cd gab = 0.0, gae = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    gae += std::conj(r.h_ae[i]) * wa[i];
    for (std::size_t j = 0; j < 3; ++j) gab += std::conj(wb[i]) * r.h_ab(i, j) * wa[j];
  }
  CHECK(in.omega_a0 == doctest::Approx(5.0 * std::norm(gab)).epsilon(1e-12));
  CHECK(in.omega_e0 == doctest::Approx(5.0 * std::norm(gae)).epsilon(1e-12));
  CHECK(std::abs(in.omega_ae0 - 5.0 * gab * std::conj(gae)) < 1e-12);
}

TEST_CASE("rks worked values") {
  RateInputs in = example();
  CHECK(rks(in) == doctest::Approx(1.5969).epsilon(1e-4));
  in.delta = 2;
  CHECK(rks(in) == doctest::Approx(1.1274).epsilon(1e-4));
  in.rho = 0.0;
  in.delta = 1;
  CHECK(rks(in) == 0.0);
}

TEST_CASE("rks at delta 0 dominates positive lags") {
  RateInputs in = example();
  in.delta = 0;
  const double top = rks(in);
  CHECK(top == doctest::Approx(2.0 * std::log2(1.1) - std::log2(1.21 - 1.0)).epsilon(1e-12));
  for (int d = 1; d < 20; ++d) {
    in.delta = d;
    CHECK(rks(in) <= top);
  }
}

TEST_CASE("rke worked values") {
  RateInputs in = example();
  CHECK(rke(in) == doctest::Approx(1.2554).epsilon(1e-4));
  in.omega_ae0 = 0.0;
  CHECK(rke(in) == doctest::Approx(1.5969).epsilon(1e-4));
}

TEST_CASE("rke leakage penalty and zero-leak identity on random grid") {
  RngStream rng(2, 0);
  for (int i = 0; i < 10000; ++i) {
    RateInputs in = random_inputs(rng);
    RateDiagnostics diag;
    const double s = rks(in);
    CHECK(rke(in, &diag) <= s + 1e-12);
    in.omega_ae0 = 0.0;
    CHECK(std::abs(rke(in) - rks(in)) <= 1e-12);
  }
}

TEST_CASE("rates are scale invariant") {
  RngStream rng(3, 0);
  for (int i = 0; i < 2000; ++i) {
    RateInputs in = random_inputs(rng);
    RateInputs scaled = in;
    const double c = rng.uniform(0.1, 10.0);
    scaled.omega_a0 *= c;
    scaled.omega_e0 *= c;
    scaled.omega_ae0 *= c;
    scaled.sigma2 *= c;
    scaled.sigma_z2 *= c;
    CHECK(std::abs(rks(in) - rks(scaled)) < 1e-9);
    CHECK(std::abs(rke(in) - rke(scaled)) < 1e-9);
  }
}

TEST_CASE("rke clamps negative values and counts them") {
  RateInputs in = example();
  in.rho = 0.1;
  in.omega_e0 = 4.0;
  in.omega_ae0 = std::sqrt(in.omega_a0 * in.omega_e0);
  RateDiagnostics diag;
  const double v = rke(in, &diag);
  CHECK(v == 0.0);
  CHECK(diag.clamp_count == 1);
  const RateReport r = reward(in, EveMode::eavesdropping, &diag);
  CHECK(r.clamped);
  CHECK(diag.clamp_count == 2);
}

TEST_CASE("rd values") {
  RateInputs in = example();
  CHECK(rd(in) == doctest::Approx(std::log2(11.0)).epsilon(1e-12));
  CHECK(rd(in) == doctest::Approx(3.4594).epsilon(1e-4));
  in.bandwidth = 2.0;
  CHECK(rd(in) == doctest::Approx(2.0 * std::log2(11.0)).epsilon(1e-12));
  in.omega_a0 = 0.0;
  CHECK(rd(in) == 0.0);
}

TEST_CASE("reward weighting and decomposition") {
  RateInputs in = example();
  in.omega_ae0 = 0.0;
  in.lambda_k = 0.5;
  RateReport r = reward(in, EveMode::sleeping);
  CHECK(r.reward == doctest::Approx(2.5282).epsilon(1e-4));
  CHECK_FALSE(r.rke.has_value());

  in = example();
  in.lambda_k = 0.0;
  r = reward(in, EveMode::eavesdropping);
  CHECK(r.reward == r.rd);
  in.lambda_k = 1.0;
  r = reward(in, EveMode::sleeping);
  CHECK(r.reward == r.rks);

  RngStream rng(4, 0);
  for (int i = 0; i < 1000; ++i) {
    RateInputs x = random_inputs(rng);
    x.lambda_k = rng.uniform();
    const EveMode xi = rng.uniform() < 0.5 ? EveMode::sleeping : EveMode::eavesdropping;
    const RateReport rep = reward(x, xi);
    CHECK(rep.key == (xi == EveMode::eavesdropping ? *rep.rke : rep.rks));
    CHECK(rep.reward == x.lambda_k * rep.key + (1.0 - x.lambda_k) * rep.rd);
  }
}

TEST_CASE("rate inputs validation") {
  RateInputs in = example();
  in.omega_ae0 = 1.0;  // exceeds sqrt(1 * 0.5)
  CHECK_THROWS_AS(reward(in, EveMode::sleeping), ParameterError);
  in = example();
  in.lambda_k = 1.5;
  CHECK_THROWS_AS(reward(in, EveMode::sleeping), ParameterError);
  in = example();
  in.sigma2 = 0.0;
  CHECK_THROWS_AS(reward(in, EveMode::sleeping), ParameterError);
}
