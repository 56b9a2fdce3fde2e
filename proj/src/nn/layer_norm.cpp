#include "plkg/nn/layer_norm.hpp"

#include <cmath>

#include "plkg/error.hpp"

namespace plkg::nn {

LayerNorm::LayerNorm(const std::string& name, std::size_t dim)
    : gain(name + ".gain", dim, 1), offset(name + ".offset", dim, 1) {
  if (dim < 2) throw ShapeError(name + ": layer norm needs at least 2 features");
  std::fill(gain.value.begin(), gain.value.end(), 1.0);
}

Tensor LayerNorm::normalize(const Tensor& x, Tensor* xhat, std::vector<double>* inv_std) const {
  const std::size_t d = dim();
  if (x.cols() != d) throw ShapeError(gain.name + ": feature count mismatch");
  Tensor y(x.rows(), d);
  if (xhat) *xhat = Tensor(x.rows(), d);
  if (inv_std) inv_std->assign(x.rows(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto xr = x.row(r);
    double mean = 0.0;
    for (double v : xr) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : xr) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + kEpsilon);
    auto yr = y.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      const double h = (xr[c] - mean) * inv;
      if (xhat) (*xhat)(r, c) = h;
      yr[c] = gain.value[c] * h + offset.value[c];
    }
    if (inv_std) (*inv_std)[r] = inv;
  }
  return y;
}

Tensor LayerNorm::infer(const Tensor& x) const { return normalize(x, nullptr, nullptr); }

Tensor LayerNorm::forward(const Tensor& x) { return normalize(x, &xhat_, &inv_std_); }

Tensor LayerNorm::backward(const Tensor& dy) {
  const std::size_t d = dim();
  if (dy.rows() != xhat_.rows() || dy.cols() != d) {
    throw ShapeError(gain.name + ": gradient shape does not match cached forward");
  }
  Tensor dx(dy.rows(), d);
  const double inv_d = 1.0 / static_cast<double>(d);
  for (std::size_t r = 0; r < dy.rows(); ++r) {
    double sum_dh = 0.0;
    double sum_dh_h = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double g = dy(r, c);
      const double h = xhat_(r, c);
      gain.grad[c] += g * h;
      offset.grad[c] += g;
      const double dh = g * gain.value[c];
      sum_dh += dh;
      sum_dh_h += dh * h;
    }
    const double inv = inv_std_[r];
    for (std::size_t c = 0; c < d; ++c) {
      const double dh = dy(r, c) * gain.value[c];
      dx(r, c) = inv * (dh - inv_d * sum_dh - xhat_(r, c) * inv_d * sum_dh_h);
    }
  }
  return dx;
}

}  // namespace plkg::nn
