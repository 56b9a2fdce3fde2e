#pragma once

#include <cstddef>
#include <optional>

#include "plkg/channel.hpp"

namespace plkg {

// Second-order statistics feeding the key and data rate formulas. All powers
// are linear; omega_* already include the transmit power.
struct RateInputs {
  double omega_a0 = 0.0;  // lag-0 legitimate autocorrelation
  double omega_e0 = 0.0;  // lag-0 eavesdropping autocorrelation
  cd omega_ae0 = 0.0;     // legitimate/eavesdropping cross-correlation
  double rho = 0.9;
  int delta = 1;
  double sigma2 = 1.19;   // sigma_z2 + sigma_zeta2
  double sigma_z2 = 1.0;
  double bandwidth = 1.0;
  double lambda_k = 0.5;

  void validate() const;
};

// Per-slot rate breakdown.
struct RateReport {
  double rks = 0.0;
  std::optional<double> rke;  // only evaluated while Eve listens
  double rd = 0.0;
  double key = 0.0;           // the key rate entering the reward
  double reward = 0.0;
  EveMode xi = EveMode::sleeping;
  bool clamped = false;       // rke was negative and clamped to zero
};

// Counts numerical interventions so they can be surfaced in metrics.
struct RateDiagnostics {
  std::size_t clamp_count = 0;
  std::size_t domain_errors = 0;
};

// Slot constants that are not realization-dependent.
struct RateContext {
  double rho = 0.9;
  int delta = 1;
  double sigma2 = 1.19;
  double sigma_z2 = 1.0;
  double bandwidth = 1.0;
  double lambda_k = 0.5;
};

// Plug-in estimates of the correlations on the current realization.
RateInputs instantaneous_gains(const ChannelState& state, const BeamPair& beams, double pa,
                               const RateContext& ctx);

// Key rate with Eve asleep, in bits.
double rks(const RateInputs& in);

// Key rate conditioned on Eve's observation, in bits; negative values are
// clamped to 0 and counted in `diag`.
double rke(const RateInputs& in, RateDiagnostics* diag = nullptr);

// B log2(1 + omega_a0 / sigma2).
double rd(const RateInputs& in);

// lambda_k * key + (1 - lambda_k) * rd, with key = rke when Eve listens.
RateReport reward(const RateInputs& in, EveMode xi, RateDiagnostics* diag = nullptr);

}  // namespace plkg
