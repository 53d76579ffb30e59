// AArch64 NEON variants (two doubles per register). NEON is baseline on
// AArch64, so no runtime check is needed beyond the build-time guard.

#include <arm_neon.h>

#include <algorithm>

#include "exactsel/kernels.hpp"
#include "kernels/reduction.hpp"

namespace exactsel::kernels {

namespace {

inline double dot_block(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return vaddvq_f64(vaddq_f64(acc0, acc1)) + tail;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  NeumaierSum total;
  for (std::size_t base = 0; base < n; base += kReductionBlock)
    total.add(dot_block(a + base, b + base, std::min(kReductionBlock, n - base)));
  return total.value();
}

double weighted_chi_neon(const double* w, const double* x, std::size_t n, double inv_eps) {
  const float64x2_t one = vdupq_n_f64(1.0);
  NeumaierSum total;
  for (std::size_t base = 0; base < n; base += kReductionBlock) {
    const std::size_t end = std::min(n, base + kReductionBlock);
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = base;
    for (; i + 2 <= end; i += 2) {
      const float64x2_t z = vmulq_n_f64(vld1q_f64(x + i), inv_eps);
      const float64x2_t t = vsubq_f64(vmulq_f64(z, z), one);
      acc = vfmaq_f64(acc, vld1q_f64(w + i), t);
    }
    double block = vaddvq_f64(acc);
    for (; i < end; ++i) {
      const double z = x[i] * inv_eps;
      block += w[i] * (z * z - 1.0);
    }
    total.add(block);
  }
  return total.value();
}

void shell_sums_neon(const double* x, const std::uint32_t* offsets, std::size_t shells, double inv_eps,
                     double* out) {
  for (std::size_t j = 0; j < shells; ++j) {
    std::size_t i = offsets[j];
    const std::size_t end = offsets[j + 1];
    float64x2_t acc = vdupq_n_f64(0.0);
    for (; i + 2 <= end; i += 2) {
      const float64x2_t z = vmulq_n_f64(vld1q_f64(x + i), inv_eps);
      acc = vfmaq_f64(acc, z, z);
    }
    double s = vaddvq_f64(acc);
    for (; i < end; ++i) {
      const double z = x[i] * inv_eps;
      s += z * z;
    }
    out[j] = s - static_cast<double>(offsets[j + 1] - offsets[j]);
  }
}

void gemv_neon(const double* W, std::size_t rows, std::size_t cols, std::size_t stride, const double* y,
               double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_neon(W + r * stride, y, cols);
}

void fourier_sweep_neon(const double* v, const double* theta, std::size_t n, int L, double* cos_out,
                        double* sin_out) {
  FourierState st(n);
  for (int l = 1; l <= L; ++l) {
    if (st.needs_reseed(l)) st.reseed(theta, l);
    cos_out[l - 1] = dot_neon(v, st.c_cur.data(), n);
    sin_out[l - 1] = dot_neon(v, st.s_cur.data(), n);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      const float64x2_t tc = vld1q_f64(st.two_cos.data() + i);
      const float64x2_t cc = vld1q_f64(st.c_cur.data() + i);
      const float64x2_t sc = vld1q_f64(st.s_cur.data() + i);
      const float64x2_t cn = vsubq_f64(vmulq_f64(tc, cc), vld1q_f64(st.c_prev.data() + i));
      const float64x2_t sn = vsubq_f64(vmulq_f64(tc, sc), vld1q_f64(st.s_prev.data() + i));
      vst1q_f64(st.c_prev.data() + i, cc);
      vst1q_f64(st.s_prev.data() + i, sc);
      vst1q_f64(st.c_cur.data() + i, cn);
      vst1q_f64(st.s_cur.data() + i, sn);
    }
    for (; i < n; ++i) {
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

const KernelTable& neon_table() {
  static const KernelTable table{
      "neon", dot_neon, weighted_chi_neon, shell_sums_neon, gemv_neon, fourier_sweep_neon,
  };
  return table;
}

}  // namespace exactsel::kernels
