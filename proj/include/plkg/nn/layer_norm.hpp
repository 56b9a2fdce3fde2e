#pragma once

#include "plkg/nn/tensor.hpp"

namespace plkg::nn {

// Per-row normalization to zero mean and unit variance, then gain and offset.
class LayerNorm {
 public:
  static constexpr double kEpsilon = 1e-5;

  LayerNorm() = default;
  LayerNorm(const std::string& name, std::size_t dim);  // gain 1, offset 0

  std::size_t dim() const { return gain.size(); }

  Tensor forward(const Tensor& x);
  Tensor infer(const Tensor& x) const;
  Tensor backward(const Tensor& dy);

  ParamRefs params() { return {&gain, &offset}; }

  Param gain;
  Param offset;

 private:
  Tensor normalize(const Tensor& x, Tensor* xhat, std::vector<double>* inv_std) const;

  Tensor xhat_;
  std::vector<double> inv_std_;
};

}  // namespace plkg::nn
