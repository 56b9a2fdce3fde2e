#pragma once

#include <vector>

#include "plkg/nn/dense.hpp"
#include "plkg/nn/layer_norm.hpp"

namespace plkg::nn {

// Dense -> LayerNorm -> ReLU for every hidden layer, then a linear output.
class Mlp {
 public:
  Mlp() = default;
  Mlp(const std::string& name, std::size_t in, std::vector<std::size_t> hidden,
      std::size_t out, RngStream& rng);

  std::size_t in_dim() const { return layers_.front().in_dim(); }
  std::size_t out_dim() const { return layers_.back().out_dim(); }

  Tensor forward(const Tensor& x);
  Tensor infer(const Tensor& x) const;
  Tensor backward(const Tensor& dy);  // returns d input

  ParamRefs params();

 private:
  std::vector<Dense> layers_;
  std::vector<LayerNorm> norms_;
  std::vector<Tensor> activations_;  // post-ReLU outputs, for the mask
};

}  // namespace plkg::nn
