#include "plkg/rates.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "plkg/error.hpp"

namespace plkg {

namespace {

std::string describe(const RateInputs& in) {
  std::ostringstream os;
  os.precision(17);
  os << "omega_a0=" << in.omega_a0 << " omega_e0=" << in.omega_e0 << " omega_ae0=("
     << in.omega_ae0.real() << "," << in.omega_ae0.imag() << ") rho=" << in.rho
     << " delta=" << in.delta << " sigma2=" << in.sigma2 << " sigma_z2=" << in.sigma_z2;
  return os.str();
}

// |rho^delta * omega_a0|^2
double lagged_power(const RateInputs& in) {
  const double lagged = std::pow(in.rho, in.delta) * in.omega_a0;
  return lagged * lagged;
}

}  // namespace

void RateInputs::validate() const {
  auto fail = [this](const std::string& msg) {
    throw ParameterError("RateInputs: " + msg + " [" + describe(*this) + "]");
  };
  if (!(omega_a0 >= 0.0)) fail("omega_a0 must be >= 0");
  if (!(omega_e0 >= 0.0)) fail("omega_e0 must be >= 0");
  if (!(sigma2 > 0.0)) fail("sigma2 must be > 0");
  if (!(sigma_z2 > 0.0)) fail("sigma_z2 must be > 0");
  if (sigma2 < sigma_z2) fail("sigma2 must be >= sigma_z2");
  if (delta < 0) fail("delta must be >= 0");
  if (!(bandwidth > 0.0)) fail("bandwidth must be > 0");
  if (!(lambda_k >= 0.0 && lambda_k <= 1.0)) fail("lambda_k must lie in [0, 1]");
  const double bound = omega_a0 * omega_e0;
  if (std::norm(omega_ae0) > bound + 1e-12 * (1.0 + bound)) {
    fail("cross-correlation violates |omega_ae0|^2 <= omega_a0 omega_e0");
  }
}

RateInputs instantaneous_gains(const ChannelState& state, const BeamPair& beams, double pa,
                               const RateContext& ctx) {
  check_unit_norm(beams.w_a, "w_a");
  check_unit_norm(beams.w_b, "w_b");
  const cd g_ab = bilinear_form(beams.w_b, state.h_ab, beams.w_a);
  const cd g_ae = inner(state.h_ae, beams.w_a);
  RateInputs in;
  in.omega_a0 = pa * std::norm(g_ab);
  in.omega_e0 = pa * std::norm(g_ae);
  in.omega_ae0 = pa * g_ab * std::conj(g_ae);
  // Rounding can push the plug-in product a hair past Cauchy-Schwarz.
  const double bound = std::sqrt(in.omega_a0 * in.omega_e0);
  const double mag = std::abs(in.omega_ae0);
  if (mag > bound) in.omega_ae0 *= bound / mag;
  in.rho = ctx.rho;
  in.delta = ctx.delta;
  in.sigma2 = ctx.sigma2;
  in.sigma_z2 = ctx.sigma_z2;
  in.bandwidth = ctx.bandwidth;
  in.lambda_k = ctx.lambda_k;
  return in;
}

double rks(const RateInputs& in) {
  const double det_a = in.omega_a0 + in.sigma2;
  const double det_ab = det_a * det_a - lagged_power(in);
  if (!(det_a > 0.0) || !(det_ab > 0.0)) {
    throw DomainError("rks: non-positive determinant [" + describe(in) + "]");
  }
  // Same as 2 log2(det_a) - log2(det_ab), written so rho = 0 gives exactly 0.
  const double r = std::pow(in.rho, in.delta) * in.omega_a0 / det_a;
  return -std::log1p(-r * r) / std::numbers::ln2;
}

double rke(const RateInputs& in, RateDiagnostics* diag) {
  const double det_a = in.omega_a0 + in.sigma2;
  const double det_e = in.omega_e0 + in.sigma_z2;
  const double leak = std::norm(in.omega_ae0);
  const double det_ae = det_a * det_e - leak;
  const double det_abe = (det_a * det_a - lagged_power(in)) * det_e - 2.0 * in.sigma2 * leak;
  if (!(det_ae > 0.0) || !(det_abe > 0.0) || !(det_e > 0.0)) {
    if (diag) ++diag->domain_errors;
    std::ostringstream os;
    os.precision(17);
    os << "rke: non-positive determinant (det_ae=" << det_ae << ", det_abe=" << det_abe
       << ") [" << describe(in) << "]";
    throw DomainError(os.str());
  }
  const double value = 2.0 * std::log2(det_ae) - std::log2(det_e) - std::log2(det_abe);
  if (value < 0.0) {
    if (diag) ++diag->clamp_count;
    return 0.0;
  }
  return value;
}

double rd(const RateInputs& in) {
  if (!(in.sigma2 > 0.0)) throw ParameterError("rd: sigma2 must be > 0");
  return in.bandwidth * std::log2(1.0 + in.omega_a0 / in.sigma2);
}

RateReport reward(const RateInputs& in, EveMode xi, RateDiagnostics* diag) {
  in.validate();
  RateReport r;
  r.xi = xi;
  r.rks = rks(in);
  r.rd = rd(in);
  if (xi == EveMode::eavesdropping) {
    const std::size_t before = diag ? diag->clamp_count : 0;
    RateDiagnostics local;
    r.rke = rke(in, diag ? diag : &local);
    r.clamped = (diag ? diag->clamp_count : local.clamp_count) > before;
    r.key = *r.rke;
  } else {
    r.key = r.rks;
  }
  r.reward = in.lambda_k * r.key + (1.0 - in.lambda_k) * r.rd;
  return r;
}

}  // namespace plkg
