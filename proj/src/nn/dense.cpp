#include "plkg/nn/dense.hpp"

#include <cmath>

#include "plkg/error.hpp"
#include "plkg/simd/kernels.hpp"

namespace plkg::nn {

Dense::Dense(const std::string& name, std::size_t in, std::size_t out, RngStream& rng)
    : w(name + ".weight", out, in), b(name + ".bias", out, 1) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (auto& x : w.value) x = rng.uniform(-bound, bound);
  for (auto& x : b.value) x = rng.uniform(-bound, bound);
}

Tensor Dense::infer(const Tensor& x) const {
  if (x.cols() != in_dim()) {
    throw ShapeError(w.name + ": expected " + std::to_string(in_dim()) + " input features, got " +
                     std::to_string(x.cols()));
  }
  const auto& k = simd::kernels();
  Tensor y(x.rows(), out_dim());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    k.gemv(w.value, w.rows, w.cols, x.row(r), b.value, y.row(r));
  }
  return y;
}

Tensor Dense::forward(const Tensor& x) {
  Tensor y = infer(x);
  x_ = x;
  return y;
}

Tensor Dense::backward(const Tensor& dy) {
  if (dy.rows() != x_.rows() || dy.cols() != out_dim()) {
    throw ShapeError(w.name + ": gradient shape does not match cached forward");
  }
  const auto& k = simd::kernels();
  const std::size_t in = in_dim();
  Tensor dx(dy.rows(), in);
  std::span<const double> wv = w.value;
  std::span<double> wg = w.grad;
  for (std::size_t r = 0; r < dy.rows(); ++r) {
    auto g = dy.row(r);
    auto xr = x_.row(r);
    auto dxr = dx.row(r);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double gj = g[j];
      if (gj == 0.0) continue;
      k.axpy(gj, wv.subspan(j * in, in), dxr);
      k.axpy(gj, xr, wg.subspan(j * in, in));
      b.grad[j] += gj;
    }
  }
  return dx;
}

}  // namespace plkg::nn
