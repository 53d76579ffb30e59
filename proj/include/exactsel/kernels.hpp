#pragma once

// Inner loops of the statistic pipeline. Every kernel has a scalar reference
// implementation; vector variants are selected once at startup from the CPU
// features and must agree with the reference to rounding (see
// tests/test_kernels.cpp).
//
// Long reductions are accumulated in blocks of kReductionBlock elements and the
// block partials are combined with Neumaier compensation, so the relative error
// stays near machine precision for 10^7-term sums whatever the lane width.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace exactsel::kernels {

inline constexpr std::size_t kReductionBlock = 256;

struct KernelTable {
  std::string_view name;

  // Σ a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // Σ w[i] * ((x[i] * inv_eps)^2 - 1)
  double (*weighted_chi)(const double* w, const double* x, std::size_t n, double inv_eps);

  // out[j] = Σ_{i in [offsets[j], offsets[j+1])} ((x[i] * inv_eps)^2 - 1), j < shells
  void (*shell_sums)(const double* x, const std::uint32_t* offsets, std::size_t shells, double inv_eps,
                     double* out);

  // out[r] = Σ_c W[r * stride + c] * y[c], r < rows, c < cols
  void (*gemv)(const double* W, std::size_t rows, std::size_t cols, std::size_t stride, const double* y,
               double* out);

  // For l = 1..L: cos_out[l-1] = Σ_i v[i] cos(l θ_i), sin_out[l-1] = Σ_i v[i] sin(l θ_i)
  void (*fourier_sweep)(const double* v, const double* theta, std::size_t n, int L, double* cos_out,
                        double* sin_out);
};

const KernelTable& scalar();

/// Vector variant compiled in and supported by this CPU, or nullptr.
const KernelTable* avx2();
const KernelTable* neon();

/// Table used by the library. The best supported variant, unless the
/// environment variable EXACTSEL_SIMD=scalar forces the reference path.
const KernelTable& active();

/// All variants usable on this machine, reference first.
std::vector<const KernelTable*> available();

}  // namespace exactsel::kernels
