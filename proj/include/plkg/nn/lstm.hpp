#pragma once

#include <vector>

#include "plkg/nn/tensor.hpp"
#include "plkg/numerics.hpp"

namespace plkg::nn {

struct LstmState {
  Tensor h;
  Tensor c;
};

struct LstmGrads {
  std::vector<Tensor> dx;  // per time step
  Tensor dh0;
  Tensor dc0;
};

// Single-layer LSTM. Gate rows in the stacked weights are ordered
// input, forget, candidate, output.
class LstmCell {
 public:
  LstmCell() = default;
  LstmCell(const std::string& name, std::size_t in, std::size_t hidden, RngStream& rng);

  std::size_t in_dim() const { return w_x.cols; }
  std::size_t hidden_dim() const { return w_h.cols; }

  // One recurrence step without caching.
  LstmState step(const Tensor& x, const LstmState& state) const;

  LstmState zero_state(std::size_t batch) const;

  // Runs the sequence from `initial` and caches every step for backward.
  LstmState forward(const std::vector<Tensor>& xs, const LstmState& initial);
  LstmState infer(const std::vector<Tensor>& xs, const LstmState& initial) const;

  // Backpropagation through time from gradients on the final (h, c).
  LstmGrads backward(const Tensor& dh_last, const Tensor& dc_last);

  ParamRefs params() { return {&w_x, &w_h, &b}; }

  Param w_x;  // 4H x in
  Param w_h;  // 4H x H
  Param b;    // 4H

 private:
  struct StepCache {
    Tensor x, h_prev, c_prev;
    Tensor i, f, g, o, c, tanh_c;
  };

  LstmState step_impl(const Tensor& x, const LstmState& state, StepCache* cache) const;

  std::vector<StepCache> cache_;
};

}  // namespace plkg::nn
