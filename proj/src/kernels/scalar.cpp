#include <algorithm>
#include <cmath>
#include <vector>

#include "exactsel/kernels.hpp"
#include "kernels/reduction.hpp"

namespace exactsel::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  NeumaierSum total;
  for (std::size_t base = 0; base < n; base += kReductionBlock) {
    const std::size_t end = std::min(n, base + kReductionBlock);
    double block = 0.0;
    for (std::size_t i = base; i < end; ++i) block += a[i] * b[i];
    total.add(block);
  }
  return total.value();
}

double weighted_chi_scalar(const double* w, const double* x, std::size_t n, double inv_eps) {
  NeumaierSum total;
  for (std::size_t base = 0; base < n; base += kReductionBlock) {
    const std::size_t end = std::min(n, base + kReductionBlock);
    double block = 0.0;
    for (std::size_t i = base; i < end; ++i) {
      const double z = x[i] * inv_eps;
      block += w[i] * (z * z - 1.0);
    }
    total.add(block);
  }
  return total.value();
}

void shell_sums_scalar(const double* x, const std::uint32_t* offsets, std::size_t shells, double inv_eps,
                       double* out) {
  for (std::size_t j = 0; j < shells; ++j) {
    double acc = 0.0;
    for (std::uint32_t i = offsets[j]; i < offsets[j + 1]; ++i) {
      const double z = x[i] * inv_eps;
      acc += z * z - 1.0;
    }
    out[j] = acc;
  }
}

void gemv_scalar(const double* W, std::size_t rows, std::size_t cols, std::size_t stride, const double* y,
                 double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_scalar(W + r * stride, y, cols);
}

void fourier_sweep_scalar(const double* v, const double* theta, std::size_t n, int L, double* cos_out,
                          double* sin_out) {
  FourierState st(n);
  for (int l = 1; l <= L; ++l) {
    if (st.needs_reseed(l)) st.reseed(theta, l);
    NeumaierSum cs, ss;
    for (std::size_t base = 0; base < n; base += kReductionBlock) {
      const std::size_t end = std::min(n, base + kReductionBlock);
      double cb = 0.0, sb = 0.0;
      for (std::size_t i = base; i < end; ++i) {
        cb += v[i] * st.c_cur[i];
        sb += v[i] * st.s_cur[i];
      }
      cs.add(cb);
      ss.add(sb);
    }
    cos_out[l - 1] = cs.value();
    sin_out[l - 1] = ss.value();
    // cos((l+1)θ) = 2 cos θ cos(lθ) - cos((l-1)θ), same recurrence for sin.
    for (std::size_t i = 0; i < n; ++i) {
      const double cn = st.two_cos[i] * st.c_cur[i] - st.c_prev[i];
      const double sn = st.two_cos[i] * st.s_cur[i] - st.s_prev[i];
      st.c_prev[i] = st.c_cur[i];
      st.s_prev[i] = st.s_cur[i];
      st.c_cur[i] = cn;
      st.s_cur[i] = sn;
    }
  }
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{
      "scalar", dot_scalar, weighted_chi_scalar, shell_sums_scalar, gemv_scalar, fourier_sweep_scalar,
  };
  return table;
}

}  // namespace exactsel::kernels
