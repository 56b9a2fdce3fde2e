#pragma once

#include <array>
#include <deque>
#include <string_view>
#include <vector>

#include "plkg/channel.hpp"
#include "plkg/predictor.hpp"
#include "plkg/rates.hpp"

namespace plkg {

enum class ObservationMode { full, partial_naive, partial_predicted };

ObservationMode parse_observation_mode(std::string_view name);
const char* to_string(ObservationMode mode);

struct EnvConfig {
  ChannelParams channel;
  double pa = 100.0;
  double pb = 100.0;
  double pmax = 100.0;
  double lambda_k = 0.5;
  double bandwidth = 1.0;
  std::size_t episode_len = 200;
  ObservationMode mode = ObservationMode::full;

  void validate() const;
  RateContext rate_context() const;
  std::size_t agent_action_dim() const { return 2 * channel.n; }
  std::size_t joint_action_dim() const { return 4 * channel.n; }
};

// Agent state: Re/Im of the legitimate equivalent channel, Re/Im of the
// (true or predicted) eavesdropping equivalent channel, Eve's mode flag or
// probability.
struct Observation {
  static constexpr std::size_t kDim = 5;
  std::array<double, kDim> values{};

  bool operator==(const Observation&) const = default;
};

// Pairs consecutive reals into complex entries and normalizes. A vector with
// norm below 1e-9 maps to the uniform beam.
CVec project_action(std::span<const double> raw);

// Joint action layout: [Alice 2N reals | Bob 2N reals].
BeamPair project_joint_action(std::span<const double> joint, std::size_t n);

FredFeatures fred_features(const EquivalentChannels& eq);

// `window` is only read in partial_predicted mode.
Observation assemble_observation(const ChannelState& state, const BeamPair& beams, double pa,
                                 ObservationMode mode, const Predictor* predictor,
                                 std::span<const FredFeatures> window);

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  RateReport report;
  bool domain_error = false;
};

class Environment {
 public:
  // `predictor` must outlive the environment; required in partial_predicted mode.
  explicit Environment(EnvConfig config, const Predictor* predictor = nullptr);

  Observation reset(RngStream& rng);

  // Raw joint action of 4N reals in [-1, 1].
  StepResult step(std::span<const double> action, RngStream& rng);
  StepResult step_beams(const BeamPair& beams, RngStream& rng);

  const EnvConfig& config() const { return config_; }
  const ChannelState& channel() const { return state_; }
  const BeamPair& beams() const { return beams_; }
  std::size_t slot() const { return slot_; }
  const RateDiagnostics& diagnostics() const { return diag_; }

 private:
  void push_fred(const EquivalentChannels& eq);
  Observation observe() const;

  EnvConfig config_;
  const Predictor* predictor_;
  ChannelState state_;
  BeamPair beams_;
  std::size_t slot_ = 0;
  bool ready_ = false;
  std::deque<FredFeatures> fred_window_;
  std::size_t window_len_;
  RateDiagnostics diag_;
};

}  // namespace plkg
