#include "plkg/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "plkg/error.hpp"

namespace plkg {

const char* to_string(EveMode mode) {
  return mode == EveMode::eavesdropping ? "eavesdropping" : "sleeping";
}

ChannelParams ChannelParams::stationary(std::size_t n, double rho) {
  ChannelParams p;
  p.n = n;
  p.rho = rho;
  p.sigma_zeta2 = 1.0 - rho * rho;
  return p;
}

void ChannelParams::validate() const {
  auto fail = [](const std::string& msg) { throw ParameterError("ChannelParams: " + msg); };
  if (n < 1) fail("n must be >= 1");
  if (!(rho >= 0.0 && rho <= 1.0)) fail("rho must lie in [0, 1]");
  if (!(sigma_zeta2 >= 0.0)) fail("sigma_zeta2 must be >= 0");
  if (!(sigma_z2 > 0.0)) fail("sigma_z2 must be > 0");
  if (!(tau >= 0.0)) fail("tau must be >= 0");
  if (!(kappa >= 0.0 && kappa <= 1.0)) fail("kappa must lie in [0, 1]");
  if (delta < 0) fail("delta must be >= 0");
}

BeamPair BeamPair::uniform(std::size_t n) {
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  return {CVec(n, cd(a, 0.0)), CVec(n, cd(a, 0.0))};
}

EveMode eve_mode(std::span<const cd> h_ae, std::span<const cd> h_be, double tau) {
  if (h_ae.size() != h_be.size()) throw ShapeError("eve_mode: link lengths differ");
  return std::min(norm(h_ae), norm(h_be)) >= tau ? EveMode::eavesdropping
                                                 : EveMode::sleeping;
}

std::pair<CVec, CVec> fred_channels(std::span<const cd> h_ae, std::span<const cd> h_be,
                                    double kappa, RngStream& rng) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw ParameterError("fred_channels: kappa outside [0, 1]");
  const std::size_t n = h_ae.size();
  // Draw both innovations even at kappa = 1 so stream consumption does not
  // depend on the correlation setting.
  CVec g_a = cgauss_vector(n, 1.0, rng);
  CVec g_b = cgauss_vector(n, 1.0, rng);
  const double mix = std::sqrt(std::max(0.0, 1.0 - kappa * kappa));
  CVec h_af(n), h_bf(n);
  for (std::size_t i = 0; i < n; ++i) {
    h_af[i] = kappa * h_ae[i] + mix * g_a[i];
    h_bf[i] = kappa * h_be[i] + mix * g_b[i];
  }
  return {std::move(h_af), std::move(h_bf)};
}

ChannelState init_channels(const ChannelParams& params, RngStream& rng) {
  params.validate();
  ChannelState s;
  s.h_ab = cgauss_matrix(params.n, 1.0, rng);
  s.h_ae = cgauss_vector(params.n, 1.0, rng);
  s.h_be = cgauss_vector(params.n, 1.0, rng);
  std::tie(s.h_af, s.h_bf) = fred_channels(s.h_ae, s.h_be, params.kappa, rng);
  s.xi = eve_mode(s.h_ae, s.h_be, params.tau);
  s.t = 0;
  return s;
}

namespace {

void ar1_in_place(std::span<cd> h, double rho, double sigma_zeta2, RngStream& rng) {
  const double s = std::sqrt(sigma_zeta2 / 2.0);
  for (auto& x : h) {
    const double re = rng.normal();
    const double im = rng.normal();
    x = rho * x + cd(s * re, s * im);
  }
}

}  // namespace

ChannelState evolve_ar1(const ChannelState& state, const ChannelParams& params,
                        RngStream& rng) {
  ChannelState next = state;
  ar1_in_place(next.h_ab.data(), params.rho, params.sigma_zeta2, rng);
  ar1_in_place(next.h_ae, params.rho, params.sigma_zeta2, rng);
  ar1_in_place(next.h_be, params.rho, params.sigma_zeta2, rng);
  std::tie(next.h_af, next.h_bf) = fred_channels(next.h_ae, next.h_be, params.kappa, rng);
  next.xi = eve_mode(next.h_ae, next.h_be, params.tau);
  next.t = state.t + 1;
  return next;
}

void check_unit_norm(std::span<const cd> w, const char* what, double tol) {
  const double n = norm(w);
  if (!(std::abs(n - 1.0) <= tol)) {
    throw ContractError(std::string(what) + " must be unit-norm, got norm " + std::to_string(n));
  }
}

EquivalentChannels equivalent_channels(const ChannelState& state, const BeamPair& beams,
                                       double pa) {
  check_unit_norm(beams.w_a, "w_a");
  check_unit_norm(beams.w_b, "w_b");
  const double amp = std::sqrt(pa);
  EquivalentChannels eq;
  eq.ab = amp * bilinear_form(beams.w_b, state.h_ab, beams.w_a);
  eq.ae = amp * inner(state.h_ae, beams.w_a);
  eq.af = amp * inner(state.h_af, beams.w_a);
  eq.bf = amp * inner(state.h_bf, beams.w_b);
  return eq;
}

double calibrate_tau(std::size_t n, double target_fraction, std::size_t samples,
                     std::uint64_t seed) {
  if (!(target_fraction > 0.0 && target_fraction < 1.0)) {
    throw ParameterError("calibrate_tau: target fraction must lie in (0, 1)");
  }
  RngStream rng(seed, n);
  std::vector<double> mins(samples);
  for (auto& m : mins) {
    const CVec a = cgauss_vector(n, 1.0, rng);
    const CVec b = cgauss_vector(n, 1.0, rng);
    m = std::min(norm(a), norm(b));
  }
  // Eavesdropping when min >= tau, so tau is the (1 - target) quantile.
  const auto k = static_cast<std::size_t>(
      std::floor((1.0 - target_fraction) * static_cast<double>(samples)));
  std::nth_element(mins.begin(), mins.begin() + static_cast<std::ptrdiff_t>(k), mins.end());
  return mins[k];
}

}  // namespace plkg
