#include <immintrin.h>

#include <cmath>

#include "plkg/simd/kernels.hpp"

namespace plkg::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 4), _mm256_loadu_pd(pb + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += pa[i] * pb[i];
  return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void lerp(double tau, std::span<const double> src, std::span<double> dst) {
  const std::size_t n = src.size();
  const __m256d vt = _mm256_set1_pd(tau);
  const __m256d vk = _mm256_set1_pd(1.0 - tau);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_mul_pd(vk, _mm256_loadu_pd(dst.data() + i));
    _mm256_storeu_pd(dst.data() + i, _mm256_fmadd_pd(vt, _mm256_loadu_pd(src.data() + i), d));
  }
  const double keep = 1.0 - tau;
  for (; i < n; ++i) dst[i] = keep * dst[i] + tau * src[i];
}

void adam(const AdamScalars& s, std::span<double> param, std::span<const double> grad,
          std::span<double> m, std::span<double> v) {
  const std::size_t n = param.size();
  const __m256d b1 = _mm256_set1_pd(s.beta1);
  const __m256d b2 = _mm256_set1_pd(s.beta2);
  const __m256d c1 = _mm256_set1_pd(1.0 - s.beta1);
  const __m256d c2 = _mm256_set1_pd(1.0 - s.beta2);
  const __m256d inv_bias1 = _mm256_set1_pd(1.0 / s.bias1);
  const __m256d inv_bias2 = _mm256_set1_pd(1.0 / s.bias2);
  const __m256d lr = _mm256_set1_pd(s.lr);
  const __m256d eps = _mm256_set1_pd(s.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad.data() + i);
    __m256d vm = _mm256_loadu_pd(m.data() + i);
    __m256d vv = _mm256_loadu_pd(v.data() + i);
    vm = _mm256_fmadd_pd(b1, vm, _mm256_mul_pd(c1, g));
    vv = _mm256_fmadd_pd(b2, vv, _mm256_mul_pd(c2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m.data() + i, vm);
    _mm256_storeu_pd(v.data() + i, vv);
    const __m256d mhat = _mm256_mul_pd(vm, inv_bias1);
    const __m256d vhat = _mm256_mul_pd(vv, inv_bias2);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, mhat),
                                       _mm256_add_pd(_mm256_sqrt_pd(vhat), eps));
    _mm256_storeu_pd(param.data() + i, _mm256_sub_pd(_mm256_loadu_pd(param.data() + i), step));
  }
  const double sc1 = 1.0 - s.beta1;
  const double sc2 = 1.0 - s.beta2;
  for (; i < n; ++i) {
    const double g = grad[i];
    m[i] = s.beta1 * m[i] + sc1 * g;
    v[i] = s.beta2 * v[i] + sc2 * g * g;
    param[i] -= s.lr * (m[i] / s.bias1) / (std::sqrt(v[i] / s.bias2) + s.eps);
  }
}

void gemv(std::span<const double> w, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> bias, std::span<double> y) {
  // Four rows at a time share each load of x.
  std::size_t r = 0;
  const double* px = x.data();
  for (; r + 4 <= rows; r += 4) {
    const double* w0 = w.data() + r * cols;
    const double* w1 = w0 + cols;
    const double* w2 = w1 + cols;
    const double* w3 = w2 + cols;
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d vx = _mm256_loadu_pd(px + c);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + c), vx, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + c), vx, a1);
      a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + c), vx, a2);
      a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + c), vx, a3);
    }
    double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
    for (; c < cols; ++c) {
      s0 += w0[c] * px[c];
      s1 += w1[c] * px[c];
      s2 += w2[c] * px[c];
      s3 += w3[c] * px[c];
    }
    y[r] = bias[r] + s0;
    y[r + 1] = bias[r + 1] + s1;
    y[r + 2] = bias[r + 2] + s2;
    y[r + 3] = bias[r + 3] + s3;
  }
  for (; r < rows; ++r) y[r] = bias[r] + dot(w.subspan(r * cols, cols), x);
}

}  // namespace plkg::simd::avx2
