#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace plkg {

using cd = std::complex<double>;
using CVec = std::vector<cd>;

// Square complex matrix, row-major.
class CMat {
 public:
  CMat() = default;
  explicit CMat(std::size_t n) : n_(n), data_(n * n) {}

  static CMat identity(std::size_t n);
  static CMat diagonal(std::span<const cd> diag);

  std::size_t size() const { return n_; }
  cd& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  const cd& operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  std::span<cd> data() { return data_; }
  std::span<const cd> data() const { return data_; }

  bool operator==(const CMat&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<cd> data_;
};

// Mixes (seed, tag) into a new 64-bit seed. Used to derive per-module and
// per-run seeds from a single experiment seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

// Reproducible random stream. Identical (seed, stream_id) pairs give identical
// draws; distinct stream ids seed the engine through independent splitmix
// sequences. Single owner: not safe for concurrent draws.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double normal();   // N(0, 1)
  double uniform();  // U[0, 1)
  double uniform(double lo, double hi);
  std::size_t index(std::size_t n);  // uniform in [0, n)

  // Child stream keyed by tag; the parent is not advanced.
  RngStream child(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// n i.i.d. circularly-symmetric complex Gaussian entries, total variance
// `variance` (variance/2 per real component).
CVec cgauss_vector(std::size_t n, double variance, RngStream& rng);
CMat cgauss_matrix(std::size_t n, double variance, RngStream& rng);

double norm(std::span<const cd> v);
cd inner(std::span<const cd> a, std::span<const cd> b);  // a^H b
CVec matvec(const CMat& h, std::span<const cd> x);        // H x
CVec matvec_h(const CMat& h, std::span<const cd> x);      // H^H x

// w_b^H H w_a.
cd bilinear_form(std::span<const cd> wb, const CMat& h, std::span<const cd> wa);

struct SingularTriple {
  CVec wa;       // right singular vector (transmit side)
  CVec wb;       // left singular vector (receive side)
  double sigma;  // wb^H H wa, real and non-negative
  int iterations;
};

struct PowerIterationOptions {
  int iters = 200;
  double tol = 1e-10;
};

// Dominant singular triple by power iteration on H^H H, started from a random
// vector drawn from `rng`. Throws DegenerateError for an all-zero matrix.
SingularTriple power_iteration_top_pair(const CMat& h, RngStream& rng,
                                        PowerIterationOptions opts = {});

}  // namespace plkg
