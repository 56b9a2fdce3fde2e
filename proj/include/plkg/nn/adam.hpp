#pragma once

#include "plkg/nn/tensor.hpp"

namespace plkg::nn {

// Adam with bias correction. Moment buffers live in each Param.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  // Applies one step using the accumulated grads; does not zero them.
  void update(const ParamRefs& params);

  long step() const { return step_; }
  double lr() const { return lr_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  long step_ = 0;
};

}  // namespace plkg::nn
