#pragma once

#include <vector>

#include "plkg/nn/tensor.hpp"
#include "plkg/numerics.hpp"

namespace plkg::nn {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kTanhEpsilon = 1e-6;

// Reparameterized tanh-squashed Gaussian sample for a batch.
struct PolicySample {
  Tensor action;                  // tanh(u), in (-1, 1)
  std::vector<double> log_prob;   // one per row
  // Saved for backward.
  Tensor noise;
  Tensor pre_tanh;
  Tensor std;
  Tensor clamped;                 // 1 where log_std hit the clamp
};

struct HeadGrads {
  Tensor d_mean;
  Tensor d_log_std;
};

// u = mean + exp(clamp(log_std)) * noise, action = tanh(u),
// log_prob = log N(u; mean, std) - sum log(1 - tanh(u)^2 + eps).
PolicySample gaussian_head(const Tensor& mean, const Tensor& log_std, const Tensor& noise);

// Draws standard-normal noise from rng and calls gaussian_head.
PolicySample gaussian_head_sample(const Tensor& mean, const Tensor& log_std, RngStream& rng);

// Chain rule from dL/daction and dL/dlog_prob back to mean and log_std.
HeadGrads gaussian_head_backward(const PolicySample& sample, const Tensor& d_action,
                                 std::span<const double> d_log_prob);

// Squashed-Gaussian log density of a pre-tanh value, recomputed from scratch.
double squashed_log_density(std::span<const double> pre_tanh, std::span<const double> mean,
                            std::span<const double> log_std);

}  // namespace plkg::nn
