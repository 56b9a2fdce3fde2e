#include "plkg/nn/adam.hpp"

#include <cmath>

#include "plkg/simd/kernels.hpp"

namespace plkg::nn {

void Adam::update(const ParamRefs& params) {
  ++step_;
  const simd::AdamScalars s{lr_,
                            beta1_,
                            beta2_,
                            eps_,
                            1.0 - std::pow(beta1_, static_cast<double>(step_)),
                            1.0 - std::pow(beta2_, static_cast<double>(step_))};
  const auto& k = simd::kernels();
  for (Param* p : params) k.adam(s, p->value, p->grad, p->m, p->v);
}

}  // namespace plkg::nn
