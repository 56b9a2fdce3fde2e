#include "plkg/nn/policy_head.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "plkg/error.hpp"

namespace plkg::nn {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

PolicySample gaussian_head(const Tensor& mean, const Tensor& log_std, const Tensor& noise) {
  if (mean.shape() != log_std.shape() || mean.shape() != noise.shape()) {
    throw ShapeError("gaussian_head: mean, log_std and noise shapes differ");
  }
  PolicySample s;
  s.noise = noise;
  s.action = Tensor(mean.rows(), mean.cols());
  s.pre_tanh = Tensor(mean.rows(), mean.cols());
  s.std = Tensor(mean.rows(), mean.cols());
  s.clamped = Tensor(mean.rows(), mean.cols());
  s.log_prob.assign(mean.rows(), 0.0);
  for (std::size_t r = 0; r < mean.rows(); ++r) {
    double lp = 0.0;
    for (std::size_t c = 0; c < mean.cols(); ++c) {
      const double raw = log_std(r, c);
      const double ls = std::clamp(raw, kLogStdMin, kLogStdMax);
      const double sd = std::exp(ls);
      const double n = noise(r, c);
      const double u = mean(r, c) + sd * n;
      const double a = std::tanh(u);
      s.std(r, c) = sd;
      s.pre_tanh(r, c) = u;
      s.action(r, c) = a;
      s.clamped(r, c) = (raw < kLogStdMin || raw > kLogStdMax) ? 1.0 : 0.0;
      lp += -0.5 * n * n - ls - kHalfLog2Pi - std::log(1.0 - a * a + kTanhEpsilon);
    }
    s.log_prob[r] = lp;
  }
  return s;
}

PolicySample gaussian_head_sample(const Tensor& mean, const Tensor& log_std, RngStream& rng) {
  Tensor noise(mean.rows(), mean.cols());
  for (auto& v : noise.data()) v = rng.normal();
  return gaussian_head(mean, log_std, noise);
}

HeadGrads gaussian_head_backward(const PolicySample& s, const Tensor& d_action,
                                 std::span<const double> d_log_prob) {
  const std::size_t rows = s.action.rows();
  const std::size_t cols = s.action.cols();
  HeadGrads g{Tensor(rows, cols), Tensor(rows, cols)};
  for (std::size_t r = 0; r < rows; ++r) {
    const double dlp = d_log_prob.empty() ? 0.0 : d_log_prob[r];
    for (std::size_t c = 0; c < cols; ++c) {
      const double a = s.action(r, c);
      const double one_minus = 1.0 - a * a;
      // d/du of -log(1 - tanh(u)^2 + eps)
      const double dcorr = 2.0 * a * one_minus / (one_minus + kTanhEpsilon);
      const double du = d_action(r, c) * one_minus + dlp * dcorr;
      g.d_mean(r, c) = du;
      if (s.clamped(r, c) == 0.0) {
        g.d_log_std(r, c) = du * s.std(r, c) * s.noise(r, c) - dlp;
      }
    }
  }
  return g;
}

double squashed_log_density(std::span<const double> pre_tanh, std::span<const double> mean,
                            std::span<const double> log_std) {
  double lp = 0.0;
  for (std::size_t i = 0; i < pre_tanh.size(); ++i) {
    const double ls = std::clamp(log_std[i], kLogStdMin, kLogStdMax);
    const double sd = std::exp(ls);
    const double z = (pre_tanh[i] - mean[i]) / sd;
    const double gauss = std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
    const double a = std::tanh(pre_tanh[i]);
    lp += std::log(gauss) - std::log(1.0 - a * a + kTanhEpsilon);
  }
  return lp;
}

}  // namespace plkg::nn
