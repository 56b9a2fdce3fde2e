#include "plkg/env.hpp"

#include <cmath>
#include <string>

#include "plkg/error.hpp"

namespace plkg {

ObservationMode parse_observation_mode(std::string_view name) {
  if (name == "full") return ObservationMode::full;
  if (name == "partial-naive") return ObservationMode::partial_naive;
  if (name == "partial-predicted") return ObservationMode::partial_predicted;
  throw ConfigError("unknown observation_mode '" + std::string(name) +
                    "' (expected full, partial-naive or partial-predicted)");
}

const char* to_string(ObservationMode mode) {
  switch (mode) {
    case ObservationMode::full:
      return "full";
    case ObservationMode::partial_naive:
      return "partial-naive";
    case ObservationMode::partial_predicted:
      return "partial-predicted";
  }
  return "?";
}

void EnvConfig::validate() const {
  channel.validate();
  auto fail = [](const std::string& msg) { throw ParameterError("EnvConfig: " + msg); };
  if (!(pmax > 0.0)) fail("Pmax must be > 0");
  if (!(pa >= 0.0 && pa <= pmax)) fail("Pa must lie in [0, Pmax]");
  if (!(pb >= 0.0 && pb <= pmax)) fail("Pb must lie in [0, Pmax]");
  if (!(lambda_k >= 0.0 && lambda_k <= 1.0)) fail("lambda_k must lie in [0, 1]");
  if (!(bandwidth > 0.0)) fail("B must be > 0");
  if (episode_len < 1) fail("episode_len must be >= 1");
}

RateContext EnvConfig::rate_context() const {
  RateContext ctx;
  ctx.rho = channel.rho;
  ctx.delta = channel.delta;
  ctx.sigma2 = channel.sigma_z2 + channel.sigma_zeta2;
  ctx.sigma_z2 = channel.sigma_z2;
  ctx.bandwidth = bandwidth;
  ctx.lambda_k = lambda_k;
  return ctx;
}

CVec project_action(std::span<const double> raw) {
  if (raw.size() % 2 != 0 || raw.empty()) {
    throw ShapeError("project_action: expected an even, non-zero number of reals");
  }
  const std::size_t n = raw.size() / 2;
  CVec w(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = cd(raw[2 * i], raw[2 * i + 1]);
    acc += std::norm(w[i]);
  }
  const double s = std::sqrt(acc);
  if (s < 1e-9) return CVec(n, cd(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
  for (auto& x : w) x /= s;
  return w;
}

BeamPair project_joint_action(std::span<const double> joint, std::size_t n) {
  if (joint.size() != 4 * n) {
    throw ShapeError("joint action must have 4N = " + std::to_string(4 * n) + " reals, got " +
                     std::to_string(joint.size()));
  }
  return {project_action(joint.subspan(0, 2 * n)), project_action(joint.subspan(2 * n, 2 * n))};
}

FredFeatures fred_features(const EquivalentChannels& eq) {
  return {eq.af.real(), eq.af.imag(), eq.bf.real(), eq.bf.imag()};
}

Observation assemble_observation(const ChannelState& state, const BeamPair& beams, double pa,
                                 ObservationMode mode, const Predictor* predictor,
                                 std::span<const FredFeatures> window) {
  const EquivalentChannels eq = equivalent_channels(state, beams, pa);
  Observation obs;
  obs.values[0] = eq.ab.real();
  obs.values[1] = eq.ab.imag();
  switch (mode) {
    case ObservationMode::full:
      obs.values[2] = eq.ae.real();
      obs.values[3] = eq.ae.imag();
      obs.values[4] = state.xi == EveMode::eavesdropping ? 1.0 : 0.0;
      break;
    case ObservationMode::partial_naive:
      obs.values[2] = 0.0;
      obs.values[3] = 0.0;
      obs.values[4] = 0.5;
      break;
    case ObservationMode::partial_predicted: {
      if (!predictor) throw ConfigError("partial-predicted observation requires a predictor");
      const Prediction p = predictor->predict(window);
      obs.values[2] = p.hae.real();
      obs.values[3] = p.hae.imag();
      obs.values[4] = p.xi_prob;
      break;
    }
  }
  return obs;
}

Environment::Environment(EnvConfig config, const Predictor* predictor)
    : config_(std::move(config)), predictor_(predictor) {
  config_.validate();
  if (config_.mode == ObservationMode::partial_predicted && !predictor_) {
    throw ConfigError("partial-predicted observation requires a predictor");
  }
  window_len_ = predictor_ ? predictor_->seq_len() : 1;
}

void Environment::push_fred(const EquivalentChannels& eq) {
  fred_window_.push_back(fred_features(eq));
  while (fred_window_.size() > window_len_) fred_window_.pop_front();
}

Observation Environment::observe() const {
  std::vector<FredFeatures> window(fred_window_.begin(), fred_window_.end());
  return assemble_observation(state_, beams_, config_.pa, config_.mode, predictor_, window);
}

Observation Environment::reset(RngStream& rng) {
  state_ = init_channels(config_.channel, rng);
  beams_ = BeamPair::uniform(config_.channel.n);
  slot_ = 0;
  ready_ = true;
  // No history yet: the first measurement stands in for the missing slots.
  fred_window_.clear();
  const EquivalentChannels eq = equivalent_channels(state_, beams_, config_.pa);
  for (std::size_t i = 0; i < window_len_; ++i) push_fred(eq);
  return observe();
}

StepResult Environment::step(std::span<const double> action, RngStream& rng) {
  return step_beams(project_joint_action(action, config_.channel.n), rng);
}

StepResult Environment::step_beams(const BeamPair& beams, RngStream& rng) {
  if (!ready_) throw ContractError("Environment::step called before reset");
  StepResult out;
  beams_ = beams;
  const RateInputs in = instantaneous_gains(state_, beams_, config_.pa, config_.rate_context());
  try {
    out.report = reward(in, state_.xi, &diag_);
    out.reward = out.report.reward;
  } catch (const DomainError&) {
    out.domain_error = true;
    out.report = RateReport{};
    out.report.xi = state_.xi;
    out.reward = 0.0;
  }
  state_ = evolve_ar1(state_, config_.channel, rng);
  ++slot_;
  push_fred(equivalent_channels(state_, beams_, config_.pa));
  out.obs = observe();
  out.done = slot_ >= config_.episode_len;
  if (out.done) ready_ = false;
  return out;
}

}  // namespace plkg
