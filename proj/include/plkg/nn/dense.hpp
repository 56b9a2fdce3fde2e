#pragma once

#include "plkg/nn/tensor.hpp"
#include "plkg/numerics.hpp"

namespace plkg::nn {

// y = x W^T + b, with W stored out x in.
class Dense {
 public:
  Dense() = default;
  // Weights and biases uniform in +-1/sqrt(in).
  Dense(const std::string& name, std::size_t in, std::size_t out, RngStream& rng);

  std::size_t in_dim() const { return w.cols; }
  std::size_t out_dim() const { return w.rows; }

  Tensor forward(const Tensor& x);        // caches x for backward
  Tensor infer(const Tensor& x) const;    // no cache
  Tensor backward(const Tensor& dy);      // accumulates dW, db; returns dx

  ParamRefs params() { return {&w, &b}; }

  Param w;
  Param b;

 private:
  Tensor x_;
};

}  // namespace plkg::nn
