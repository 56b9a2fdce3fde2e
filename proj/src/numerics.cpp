#include "plkg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plkg/error.hpp"

namespace plkg {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t state = seed ^ (stream_id * 0xD1B54A32D192ED03ULL);
  std::uint64_t a = splitmix64(state);
  std::uint64_t b = splitmix64(state);
  std::uint64_t c = splitmix64(state);
  std::uint64_t d = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                    static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

CMat CMat::identity(std::size_t n) {
  CMat m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat CMat::diagonal(std::span<const cd> diag) {
  CMat m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t state = seed;
  splitmix64(state);
  state ^= tag * 0xA0761D6478BD642FULL;
  return splitmix64(state);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

double RngStream::normal() { return normal_(engine_); }

double RngStream::uniform() { return uniform_(engine_); }

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }

std::size_t RngStream::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

RngStream RngStream::child(std::uint64_t tag) const {
  return RngStream(derive_seed(seed_, stream_id_), tag);
}

CVec cgauss_vector(std::size_t n, double variance, RngStream& rng) {
  if (!(variance > 0.0)) {
    throw ParameterError("cgauss_vector: variance must be positive, got " +
                         std::to_string(variance));
  }
  if (n == 0) throw ParameterError("cgauss_vector: n must be at least 1");
  const double s = std::sqrt(variance / 2.0);
  CVec v(n);
  for (auto& x : v) {
    const double re = rng.normal();
    const double im = rng.normal();
    x = cd(s * re, s * im);
  }
  return v;
}

CMat cgauss_matrix(std::size_t n, double variance, RngStream& rng) {
  CMat m(n);
  CVec entries = cgauss_vector(n * n, variance, rng);
  std::copy(entries.begin(), entries.end(), m.data().begin());
  return m;
}

double norm(std::span<const cd> v) {
  double acc = 0.0;
  for (const auto& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

cd inner(std::span<const cd> a, std::span<const cd> b) {
  if (a.size() != b.size()) throw ShapeError("inner: length mismatch");
  cd acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

CVec matvec(const CMat& h, std::span<const cd> x) {
  const std::size_t n = h.size();
  if (x.size() != n) throw ShapeError("matvec: length mismatch");
  CVec y(n);
  for (std::size_t r = 0; r < n; ++r) {
    cd acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) acc += h(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

CVec matvec_h(const CMat& h, std::span<const cd> x) {
  const std::size_t n = h.size();
  if (x.size() != n) throw ShapeError("matvec_h: length mismatch");
  CVec y(n, cd(0.0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) y[c] += std::conj(h(r, c)) * x[r];
  }
  return y;
}

cd bilinear_form(std::span<const cd> wb, const CMat& h, std::span<const cd> wa) {
  const std::size_t n = h.size();
  if (wb.size() != n || wa.size() != n) {
    throw ShapeError("bilinear_form: beam lengths " + std::to_string(wb.size()) + "/" +
                     std::to_string(wa.size()) + " do not match matrix size " +
                     std::to_string(n));
  }
  cd acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    cd row = 0.0;
    for (std::size_t c = 0; c < n; ++c) row += h(r, c) * wa[c];
    acc += std::conj(wb[r]) * row;
  }
  return acc;
}

SingularTriple power_iteration_top_pair(const CMat& h, RngStream& rng,
                                        PowerIterationOptions opts) {
  const std::size_t n = h.size();
  if (n == 0) throw ShapeError("power_iteration_top_pair: empty matrix");
  double fro = 0.0;
  for (const auto& x : h.data()) fro += std::norm(x);
  if (fro == 0.0 || !std::isfinite(fro)) {
    throw DegenerateError("power_iteration_top_pair: matrix is zero or non-finite");
  }

  CVec wa = cgauss_vector(n, 1.0, rng);
  double wa_norm = norm(wa);
  for (auto& x : wa) x /= wa_norm;

  CVec wb(n);
  double sigma = 0.0;
  int it = 0;
  for (it = 1; it <= opts.iters; ++it) {
    CVec v = matvec(h, wa);
    const double s = norm(v);
    if (s == 0.0) {
      // Start vector fell in the null space; restart from a fresh draw.
      wa = cgauss_vector(n, 1.0, rng);
      wa_norm = norm(wa);
      for (auto& x : wa) x /= wa_norm;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) wb[i] = v[i] / s;
    CVec u = matvec_h(h, wb);
    const double un = norm(u);
    for (std::size_t i = 0; i < n; ++i) wa[i] = u[i] / un;
    const bool converged = std::abs(un - sigma) < opts.tol;
    sigma = un;
    if (converged) break;
  }
  // Re-derive wb from the final wa so that wb^H H wa is real and equals sigma.
  CVec v = matvec(h, wa);
  sigma = norm(v);
  for (std::size_t i = 0; i < n; ++i) wb[i] = v[i] / sigma;
  return {std::move(wa), std::move(wb), sigma, std::min(it, opts.iters)};
}

}  // namespace plkg
