#pragma once

// Data-parallel inner loops shared by the dense, LSTM, optimizer and
// soft-update code. Each kernel has a portable scalar reference and an
// AVX2/FMA variant; the variant is chosen once per process.

#include <cstddef>
#include <span>

namespace plkg::simd {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);

struct AdamScalars {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias1;  // 1 - beta1^t
  double bias2;  // 1 - beta2^t
};

struct KernelTable {
  // sum_i a[i] * b[i]
  double (*dot)(std::span<const double> a, std::span<const double> b);
  // y += alpha * x
  void (*axpy)(double alpha, std::span<const double> x, std::span<double> y);
  // dst = (1 - tau) * dst + tau * src
  void (*lerp)(double tau, std::span<const double> src, std::span<double> dst);
  // Bias-corrected Adam step over one parameter block.
  void (*adam)(const AdamScalars& s, std::span<double> param, std::span<const double> grad,
               std::span<double> m, std::span<double> v);
  // y[r] = bias[r] + dot(W[r, :], x) for a row-major rows x cols W.
  void (*gemv)(std::span<const double> w, std::size_t rows, std::size_t cols,
               std::span<const double> x, std::span<const double> bias, std::span<double> y);
};

bool isa_available(Isa isa);

// Kernel set for a specific ISA; throws if it is not available on this CPU.
const KernelTable& kernels_for(Isa isa);

// Best available ISA. PLKG_SIMD=scalar in the environment forces the scalar path.
Isa active_isa();
const KernelTable& kernels();

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void lerp(double tau, std::span<const double> src, std::span<double> dst);
void adam(const AdamScalars& s, std::span<double> param, std::span<const double> grad,
          std::span<double> m, std::span<double> v);
void gemv(std::span<const double> w, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> bias, std::span<double> y);
}  // namespace scalar

#ifdef PLKG_HAVE_AVX2
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void lerp(double tau, std::span<const double> src, std::span<double> dst);
void adam(const AdamScalars& s, std::span<double> param, std::span<const double> grad,
          std::span<double> m, std::span<double> v);
void gemv(std::span<const double> w, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<const double> bias, std::span<double> y);
}  // namespace avx2
#endif

}  // namespace plkg::simd
