// AVX2 + FMA variants. This translation unit is built with -mavx2 -mfma and
// must only be entered after the runtime CPU check in dispatch.cpp.

#include <immintrin.h>

#include <algorithm>

#include "exactsel/kernels.hpp"
#include "kernels/reduction.hpp"

namespace exactsel::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// One block of Σ a*b; two independent accumulators hide FMA latency.
inline double dot_block(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return hsum(_mm256_add_pd(acc0, acc1)) + tail;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  NeumaierSum total;
  for (std::size_t base = 0; base < n; base += kReductionBlock)
    total.add(dot_block(a + base, b + base, std::min(kReductionBlock, n - base)));
  return total.value();
}

double weighted_chi_avx2(const double* w, const double* x, std::size_t n, double inv_eps) {
  const __m256d scale = _mm256_set1_pd(inv_eps);
  const __m256d one = _mm256_set1_pd(1.0);
  NeumaierSum total;
  for (std::size_t base = 0; base < n; base += kReductionBlock) {
    const std::size_t end = std::min(n, base + kReductionBlock);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = base;
    for (; i + 4 <= end; i += 4) {
      const __m256d z = _mm256_mul_pd(_mm256_loadu_pd(x + i), scale);
      const __m256d t = _mm256_fmsub_pd(z, z, one);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), t, acc);
    }
    double block = hsum(acc);
    for (; i < end; ++i) {
      const double z = x[i] * inv_eps;
      block += w[i] * (z * z - 1.0);
    }
    total.add(block);
  }
  return total.value();
}

void shell_sums_avx2(const double* x, const std::uint32_t* offsets, std::size_t shells, double inv_eps,
                     double* out) {
  const __m256d scale = _mm256_set1_pd(inv_eps);
  for (std::size_t j = 0; j < shells; ++j) {
    std::size_t i = offsets[j];
    const std::size_t end = offsets[j + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= end; i += 4) {
      const __m256d z = _mm256_mul_pd(_mm256_loadu_pd(x + i), scale);
      acc = _mm256_fmadd_pd(z, z, acc);
    }
    double s = hsum(acc);
    for (; i < end; ++i) {
      const double z = x[i] * inv_eps;
      s += z * z;
    }
    out[j] = s - static_cast<double>(offsets[j + 1] - offsets[j]);
  }
}

void gemv_avx2(const double* W, std::size_t rows, std::size_t cols, std::size_t stride, const double* y,
               double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_avx2(W + r * stride, y, cols);
}

void fourier_sweep_avx2(const double* v, const double* theta, std::size_t n, int L, double* cos_out,
                        double* sin_out) {
  FourierState st(n);
  for (int l = 1; l <= L; ++l) {
    if (st.needs_reseed(l)) st.reseed(theta, l);
    cos_out[l - 1] = dot_avx2(v, st.c_cur.data(), n);
    sin_out[l - 1] = dot_avx2(v, st.s_cur.data(), n);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      const __m256d tc = _mm256_loadu_pd(st.two_cos.data() + i);
      const __m256d cc = _mm256_loadu_pd(st.c_cur.data() + i);
      const __m256d sc = _mm256_loadu_pd(st.s_cur.data() + i);
      const __m256d cn = _mm256_sub_pd(_mm256_mul_pd(tc, cc), _mm256_loadu_pd(st.c_prev.data() + i));
      const __m256d sn = _mm256_sub_pd(_mm256_mul_pd(tc, sc), _mm256_loadu_pd(st.s_prev.data() + i));
      _mm256_storeu_pd(st.c_prev.data() + i, cc);
      _mm256_storeu_pd(st.s_prev.data() + i, sc);
      _mm256_storeu_pd(st.c_cur.data() + i, cn);
      _mm256_storeu_pd(st.s_cur.data() + i, sn);
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

const KernelTable& avx2_table() {
  static const KernelTable table{
      "avx2", dot_avx2, weighted_chi_avx2, shell_sums_avx2, gemv_avx2, fourier_sweep_avx2,
  };
  return table;
}

}  // namespace exactsel::kernels
