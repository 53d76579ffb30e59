#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "exactsel/kernels.hpp"

using namespace exactsel;

namespace {

using LD = long double;

std::vector<double> uniform(std::size_t n, std::uint64_t seed, double lo = -1, double hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// |got - want| <= tol * scale, where scale is the sum of absolute terms
void close(double got, LD want, LD scale, double tol) {
  CHECK(static_cast<double>(std::abs(static_cast<LD>(got) - want)) <= tol * static_cast<double>(scale) + 1e-300);
}

const std::vector<std::size_t> kLengths{0, 1, 2, 3, 5, 7, 31, 255, 256, 257, 1023, 4097};

}  // namespace

TEST_CASE("variants on offer") {
  const auto all = kernels::available();
  REQUIRE(!all.empty());
  CHECK(all.front() == &kernels::scalar());
  CHECK(kernels::scalar().name == "scalar");
  bool found = false;
  for (const auto* t : all) found |= t == &kernels::active();
  CHECK(found);
#if defined(__x86_64__)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    REQUIRE(kernels::avx2() != nullptr);
    const char* env = std::getenv("EXACTSEL_SIMD");
    if (!env || std::string(env) != "scalar") CHECK(kernels::active().name == "avx2");
  }
  CHECK(kernels::neon() == nullptr);
#endif
  if (const char* env = std::getenv("EXACTSEL_SIMD"); env && std::string(env) == "scalar")
    CHECK(&kernels::active() == &kernels::scalar());
  INFO("active kernel: " << std::string(kernels::active().name));
}

TEST_CASE("dot and weighted_chi against long double") {
  for (const auto* t : kernels::available()) {
    INFO(std::string(t->name));
    for (std::size_t n : kLengths) {
      const auto a = uniform(n, n + 1), b = uniform(n, n + 2), w = uniform(n, n + 3, 0, 1);
      LD dot = 0, scale = 0, chi = 0, cscale = 0;
      const double inv_eps = 3.7;
      for (std::size_t i = 0; i < n; ++i) {
        dot += LD(a[i]) * b[i];
        scale += std::abs(LD(a[i]) * b[i]);
        const LD z = LD(b[i]) * inv_eps;
        chi += w[i] * (z * z - 1);
        cscale += w[i] * (z * z + 1);
      }
      close(t->dot(a.data(), b.data(), n), dot, scale, 1e-15);
      close(t->weighted_chi(w.data(), b.data(), n, inv_eps), chi, cscale, 1e-15);
      // identical to the reference up to rounding
      close(t->dot(a.data(), b.data(), n), static_cast<LD>(kernels::scalar().dot(a.data(), b.data(), n)), scale,
            2e-15);
    }
  }
}

TEST_CASE("shell_sums and gemv against long double") {
  for (const auto* t : kernels::available()) {
    INFO(std::string(t->name));
    std::mt19937_64 rng(9);
    for (std::size_t shells : {1u, 2u, 7u, 33u}) {
      std::vector<std::uint32_t> off{0};
      std::uniform_int_distribution<std::uint32_t> width(0, 19);
      for (std::size_t j = 0; j < shells; ++j) off.push_back(off.back() + width(rng));
      const auto x = uniform(off.back(), shells);
      std::vector<double> out(shells);
      t->shell_sums(x.data(), off.data(), shells, 2.5, out.data());
      for (std::size_t j = 0; j < shells; ++j) {
        LD s = 0, sc = 0;
        for (std::uint32_t i = off[j]; i < off[j + 1]; ++i) {
          const LD z = LD(x[i]) * 2.5;
          s += z * z - 1;
          sc += z * z + 1;
        }
        close(out[j], s, sc, 1e-15);
      }
    }
    for (std::size_t rows : {1u, 3u, 20u})
      for (std::size_t cols : {1u, 5u, 17u, 600u}) {
        const std::size_t stride = cols + 3;
        const auto W = uniform(rows * stride, rows + cols, 0, 1);
        const auto y = uniform(cols, cols * 7);
        std::vector<double> out(rows);
        t->gemv(W.data(), rows, cols, stride, y.data(), out.data());
        for (std::size_t r = 0; r < rows; ++r) {
          LD s = 0, sc = 0;
          for (std::size_t c = 0; c < cols; ++c) {
            s += LD(W[r * stride + c]) * y[c];
            sc += std::abs(LD(W[r * stride + c]) * y[c]);
          }
          close(out[r], s, sc, 1e-15);
        }
      }
  }
}

TEST_CASE("fourier_sweep against direct evaluation") {
  for (const auto* t : kernels::available()) {
    INFO(std::string(t->name));
    for (std::size_t n : {1u, 3u, 64u, 129u}) {
      const auto v = uniform(n, 100 + n);
      const auto theta = uniform(n, 200 + n, 0, 2 * std::numbers::pi);
      const int L = 700;
      std::vector<double> c(L), s(L);
      t->fourier_sweep(v.data(), theta.data(), n, L, c.data(), s.data());
      LD scale = 0;
      for (double x : v) scale += std::abs(LD(x));
      std::vector<double> c0(L), s0(L);
      kernels::scalar().fourier_sweep(v.data(), theta.data(), n, L, c0.data(), s0.data());
      for (int l = 1; l <= L; ++l) {
        close(c[l - 1], c0[l - 1], scale, 1e-13);
        close(s[l - 1], s0[l - 1], scale, 1e-13);
        LD cw = 0, sw = 0;
        for (std::size_t i = 0; i < n; ++i) {
          cw += v[i] * std::cos(LD(l) * theta[i]);
          sw += v[i] * std::sin(LD(l) * theta[i]);
        }
        // 32-step recurrence between reseeds: worst 2.8e-11 per unit weight near theta = 0 mod 2pi
        close(c[l - 1], cw, scale, 5e-11);
        close(s[l - 1], sw, scale, 5e-11);
      }
    }
  }
}

TEST_CASE("1e7-term reductions stay accurate") {
  const std::size_t n = 10'000'000;
  const auto a = uniform(n, 1, 0, 1), b = uniform(n, 2, 0, 1);
  LD want = 0;
  for (std::size_t i = 0; i < n; ++i) want += LD(a[i]) * b[i];
  for (const auto* t : kernels::available()) {
    INFO(std::string(t->name));
    const double got = t->dot(a.data(), b.data(), n);
    CHECK(static_cast<double>(std::abs((got - want) / want)) <= 1e-14);
  }
  // unit weights turn weighted_chi into a plain sum of z² - 1 with heavy cancellation
  const std::vector<double> ones(n, 1.0);
  const auto x = uniform(n, 3);
  LD chi = 0, scale = 0;
  for (double v : x) {
    const LD z = LD(v) * std::sqrt(3.0L);
    chi += z * z - 1;
    scale += z * z + 1;
  }
  for (const auto* t : kernels::available()) {
    INFO(std::string(t->name));
    close(t->weighted_chi(ones.data(), x.data(), n, static_cast<double>(std::sqrt(3.0L))), chi, scale, 1e-15);
  }
}
