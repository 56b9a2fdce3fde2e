#include <doctest.h>

#include <cmath>
#include <vector>

#include "plkg/numerics.hpp"
#include "plkg/simd/kernels.hpp"

using namespace plkg;
using namespace plkg::simd;

namespace {

std::vector<double> random_vec(std::size_t n, RngStream& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("scalar kernels match hand evaluation") {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(scalar::dot(a, b) == 32.0);
  std::vector<double> y{1, 1, 1};
  scalar::axpy(2.0, a, y);
  CHECK(y == std::vector<double>{3, 5, 7});
  std::vector<double> d{0, 0, 0};
  scalar::lerp(0.25, b, d);
  CHECK(d == std::vector<double>{1.0, 1.25, 1.5});
  const std::vector<double> w{1, 0, 0, 1, 1, 1};  // 3x2
  std::vector<double> out(3);
  scalar::gemv(w, 3, 2, std::vector<double>{2, 3}, std::vector<double>{0.5, 0.5, 0.5}, out);
  CHECK(out == std::vector<double>{2.5, 3.5, 5.5});
}

TEST_CASE("dispatch honours availability") {
  CHECK(isa_available(Isa::scalar));
  CHECK(&kernels_for(Isa::scalar) != nullptr);
  if (!isa_available(Isa::avx2)) CHECK_THROWS(kernels_for(Isa::avx2));
  CHECK(&kernels() == &kernels_for(active_isa()));
}

#ifdef PLKG_HAVE_AVX2
TEST_CASE("avx2 kernels agree with scalar references") {
  if (!isa_available(Isa::avx2)) return;
  const auto& s = kernels_for(Isa::scalar);
  const auto& v = kernels_for(Isa::avx2);
  RngStream rng(1, 0);
  // Lengths cover empty, sub-vector tails and multi-block bodies.
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 64u, 129u, 515u}) {
    const auto a = random_vec(n, rng), b = random_vec(n, rng);
    CHECK(std::abs(s.dot(a, b) - v.dot(a, b)) <= 1e-12 * (1.0 + n));

    auto y1 = random_vec(n, rng), y2 = y1;
    s.axpy(0.37, a, y1);
    v.axpy(0.37, a, y2);
    CHECK(max_abs_diff(y1, y2) <= 1e-15 * 4);

    auto d1 = random_vec(n, rng), d2 = d1;
    s.lerp(0.005, a, d1);
    v.lerp(0.005, a, d2);
    CHECK(max_abs_diff(d1, d2) <= 1e-15 * 4);

    auto p1 = random_vec(n, rng), p2 = p1;
    auto m1 = random_vec(n, rng), m2 = m1;
    auto q1 = random_vec(n, rng);
    for (auto& x : q1) x = std::abs(x);
    auto q2 = q1;
    const AdamScalars sc{1e-3, 0.9, 0.999, 1e-8, 1.0 - std::pow(0.9, 3), 1.0 - std::pow(0.999, 3)};
    s.adam(sc, p1, b, m1, q1);
    v.adam(sc, p2, b, m2, q2);
    CHECK(max_abs_diff(p1, p2) <= 1e-14);
    CHECK(max_abs_diff(m1, m2) <= 1e-14);
    CHECK(max_abs_diff(q1, q2) <= 1e-14);

    for (std::size_t rows : {1u, 3u, 4u, 6u, 13u}) {
      const auto w = random_vec(rows * n, rng);
      const auto bias = random_vec(rows, rng);
      std::vector<double> o1(rows), o2(rows);
      s.gemv(w, rows, n, a, bias, o1);
      v.gemv(w, rows, n, a, bias, o2);
      CHECK(max_abs_diff(o1, o2) <= 1e-12 * (1.0 + n));
    }
  }
}
#endif
