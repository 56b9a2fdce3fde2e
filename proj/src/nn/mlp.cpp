#include "plkg/nn/mlp.hpp"

#include <algorithm>

namespace plkg::nn {

namespace {

void relu_in_place(Tensor& t) {
  for (auto& v : t.data()) v = std::max(v, 0.0);
}

}  // namespace

Mlp::Mlp(const std::string& name, std::size_t in, std::vector<std::size_t> hidden,
         std::size_t out, RngStream& rng) {
  std::size_t prev = in;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    const std::string tag = name + ".fc" + std::to_string(i);
    layers_.emplace_back(tag, prev, hidden[i], rng);
    norms_.emplace_back(name + ".ln" + std::to_string(i), hidden[i]);
    prev = hidden[i];
  }
  layers_.emplace_back(name + ".out", prev, out, rng);
}

Tensor Mlp::forward(const Tensor& x) {
  activations_.clear();
  Tensor h = x;
  for (std::size_t i = 0; i < norms_.size(); ++i) {
    h = norms_[i].forward(layers_[i].forward(h));
    relu_in_place(h);
    activations_.push_back(h);
  }
  return layers_.back().forward(h);
}

Tensor Mlp::infer(const Tensor& x) const {
  Tensor h = x;
  for (std::size_t i = 0; i < norms_.size(); ++i) {
    h = norms_[i].infer(layers_[i].infer(h));
    relu_in_place(h);
  }
  return layers_.back().infer(h);
}

Tensor Mlp::backward(const Tensor& dy) {
  Tensor g = layers_.back().backward(dy);
  for (std::size_t i = norms_.size(); i-- > 0;) {
    const Tensor& act = activations_[i];
    auto gd = g.data();
    auto ad = act.data();
    for (std::size_t k = 0; k < gd.size(); ++k) {
      if (ad[k] <= 0.0) gd[k] = 0.0;
    }
    g = layers_[i].backward(norms_[i].backward(g));
  }
  return g;
}

ParamRefs Mlp::params() {
  ParamRefs out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    out.push_back(&layers_[i].w);
    out.push_back(&layers_[i].b);
    if (i < norms_.size()) {
      out.push_back(&norms_[i].gain);
      out.push_back(&norms_[i].offset);
    }
  }
  return out;
}

}  // namespace plkg::nn
