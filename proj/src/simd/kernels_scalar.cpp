#include <cmath>

#include "plkg/simd/kernels.hpp"

namespace plkg::simd::scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void lerp(double tau, std::span<const double> src, std::span<double> dst) {
  const double keep = 1.0 - tau;
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = keep * dst[i] + tau * src[i];
}

void adam(const AdamScalars& s, std::span<double> param, std::span<const double> grad,
          std::span<double> m, std::span<double> v) {
  const double c1 = 1.0 - s.beta1;
  const double c2 = 1.0 - s.beta2;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    m[i] = s.beta1 * m[i] + c1 * g;
    v[i] = s.beta2 * v[i] + c2 * g * g;
    const double mhat = m[i] / s.bias1;
    const double vhat = v[i] / s.bias2;
    param[i] -= s.lr * mhat / (std::sqrt(vhat) + s.eps);
  }
}

void gemv(std::span<const double> w, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> bias, std::span<double> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = bias[r] + dot(w.subspan(r * cols, cols), x);
  }
}

}  // namespace plkg::simd::scalar
