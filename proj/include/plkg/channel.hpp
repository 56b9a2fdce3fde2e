#pragma once

#include <cstdint>
#include <utility>

#include "plkg/numerics.hpp"

namespace plkg {

enum class EveMode { eavesdropping, sleeping };

const char* to_string(EveMode mode);

// Static parameters of the channel process. Powers are linear and relative
// to the receiver noise reference.
struct ChannelParams {
  std::size_t n = 8;          // antennas at Alice and at Bob
  double rho = 0.9;           // AR(1) coefficient
  double sigma_zeta2 = 0.19;  // innovation variance per entry
  double sigma_z2 = 1.0;      // receiver noise variance
  double tau = 0.0;           // Eve activation threshold on channel norm
  double kappa = 0.9;         // Fred/Eve correlation
  int delta = 1;              // duplex lag in slots

  // rho, n given; innovation variance set to 1 - rho^2 (unit-power stationary).
  static ChannelParams stationary(std::size_t n, double rho);

  void validate() const;
};

// One slot's realization of every link.
struct ChannelState {
  CMat h_ab;         // Alice -> Bob, n x n
  CVec h_ae, h_be;   // Alice -> Eve, Bob -> Eve
  CVec h_af, h_bf;   // Alice -> Fred, Bob -> Fred
  EveMode xi = EveMode::sleeping;
  std::uint64_t t = 0;

  bool operator==(const ChannelState&) const = default;
};

// Unit-norm transmit (Alice) and receive (Bob) beams.
struct BeamPair {
  CVec w_a;
  CVec w_b;

  static BeamPair uniform(std::size_t n);
};

EveMode eve_mode(std::span<const cd> h_ae, std::span<const cd> h_be, double tau);

// Gauss-Markov mixture: h_xf = kappa h_xe + sqrt(1 - kappa^2) g, g fresh.
std::pair<CVec, CVec> fred_channels(std::span<const cd> h_ae, std::span<const cd> h_be,
                                    double kappa, RngStream& rng);

ChannelState init_channels(const ChannelParams& params, RngStream& rng);

// Advances every link by one slot. The legitimate and eavesdropping links
// follow H <- rho H + Z; Fred is re-mixed from the new Eve links.
ChannelState evolve_ar1(const ChannelState& state, const ChannelParams& params,
                        RngStream& rng);

struct EquivalentChannels {
  cd ab;  // sqrt(Pa) w_b^H H_ab w_a
  cd ae;  // sqrt(Pa) h_ae^H w_a
  cd af;  // sqrt(Pa) h_af^H w_a
  cd bf;  // sqrt(Pa) h_bf^H w_b
};

// Throws ContractError when either beam's norm is off unity by more than 1e-6.
EquivalentChannels equivalent_channels(const ChannelState& state, const BeamPair& beams,
                                       double pa);

void check_unit_norm(std::span<const cd> w, const char* what, double tol = 1e-6);

// Monte-Carlo threshold so that min(|h_ae|, |h_be|) >= tau holds in a
// `target_fraction` of slots for unit-variance n-vectors.
double calibrate_tau(std::size_t n, double target_fraction = 0.5,
                     std::size_t samples = 200000, std::uint64_t seed = 0x7A0);

}  // namespace plkg
