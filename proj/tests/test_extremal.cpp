#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "exactsel/errors.hpp"
#include "exactsel/extremal.hpp"

using namespace exactsel;
using std::numbers::pi;

namespace {

// θ*² written out term by term, straight from the closed form.
double oracle_theta_sq(double r, int k, double sigma, const std::vector<int>& l) {
  double c2 = 0;
  for (int x : l) c2 += (2 * pi * x) * (2 * pi * x);
  c2 = std::pow(c2, sigma);
  const double kk = k;
  const double lead = std::pow(r, 2 + kk / sigma) * std::pow(2.0, kk) * std::pow(pi, kk / 2) * (kk + 2 * sigma) *
                      std::tgamma(1 + kk / 2) / (2 * sigma * std::pow(1 + 4 * sigma / kk, kk / (2 * sigma)));
  return std::max(0.0, lead * (1 - c2 * r * r / (1 + 4 * sigma / kk)));
}

// Sum of θ*⁴ by scanning the cube [-c, c]^k.
double oracle_sum_theta4(double r, int k, double sigma, std::size_t* support = nullptr) {
  const double R = std::pow(1 + 4 * sigma / k, 1 / (2 * sigma)) / (2 * pi * std::pow(r, 1 / sigma));
  const int c = static_cast<int>(std::ceil(R)) + 1;
  std::vector<int> p(static_cast<std::size_t>(k), -c);
  double s = 0;
  std::size_t n = 0;
  for (;;) {
    if (std::none_of(p.begin(), p.end(), [](int x) { return x == 0; })) {
      const double t = oracle_theta_sq(r, k, sigma, p);
      if (t > 0) ++n;
      s += t * t;
    }
    int i = k - 1;
    while (i >= 0 && p[static_cast<std::size_t>(i)] == c) p[static_cast<std::size_t>(i--)] = -c;
    if (i < 0) break;
    ++p[static_cast<std::size_t>(i)];
  }
  if (support) *support = n;
  return s;
}

double oracle_a(double r, int k, double sigma, double eps) {
  return std::sqrt(oracle_sum_theta4(r, k, sigma) / (2 * std::pow(eps, 4)));
}

}  // namespace

TEST_CASE("admissible bound and Sobolev coefficients") {
  CHECK(admissible_radius_bound(1, 1.0) == doctest::Approx(1 / (2 * pi)));
  CHECK(admissible_radius_bound(4, 2.0) == doctest::Approx(std::pow(2 * pi, -2.0) / 4));
  CHECK(std::pow(sobolev_coeff(FrequencyIndex({1}), 1.0), 2) == doctest::Approx(39.47842).epsilon(1e-7));
  CHECK(std::pow(sobolev_coeff(FrequencyIndex({1, 1}), 1.0), 2) == doctest::Approx(78.95684).epsilon(1e-7));
  CHECK(std::pow(sobolev_coeff(FrequencyIndex({1}), 2.0), 2) == doctest::Approx(1558.545).epsilon(1e-6));
  CHECK(sobolev_coeff_sq(5, 1.5) == doctest::Approx(std::pow(sobolev_coeff(FrequencyIndex({1, -2}), 1.5), 2)));
  CHECK_THROWS_AS(FrequencyIndex({0}), DomainError);
}

TEST_CASE("extremal_sequence at r = 0.1, k = 1, sigma = 1") {
  const auto p = extremal_sequence(0.1, 1, 1.0);
  CHECK(p.support_radius() == doctest::Approx(3.5588).epsilon(1e-4));
  CHECK(p.support_size() == 6);
  const auto pts = p.support();
  std::vector<int> got;
  for (std::size_t i = 0; i < pts.size(); ++i) got.push_back(pts.point(i)[0]);
  CHECK(got == std::vector<int>{-3, -2, -1, 1, 2, 3});
  const double lead = 3 * pi / (2 * std::sqrt(5.0)) * 1e-3;
  CHECK(lead == doctest::Approx(2.1073e-3).epsilon(1e-4));
  CHECK(p.theta_sq(FrequencyIndex({1})) == doctest::Approx(lead * (1 - 4 * pi * pi * 0.01 / 5)).epsilon(1e-12));
  CHECK(p.theta_sq(FrequencyIndex({1})) == doctest::Approx(1.9409e-3).epsilon(1e-4));
  CHECK(p.theta_sq(FrequencyIndex({4})) == 0.0);
  CHECK(p.theta_sq(FrequencyIndex({-4})) == 0.0);
}

TEST_CASE("extremal_sequence domain and capacity guards") {
  CHECK_THROWS_AS(extremal_sequence(0.2, 1, 1.0), DomainError);
  CHECK_THROWS_AS(extremal_sequence(0.0, 1, 1.0), DomainError);
  CHECK_THROWS_AS(extremal_sequence(-0.1, 1, 1.0), DomainError);
  try {
    (void)extremal_sequence(0.2, 1, 1.0);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("0.159") != std::string::npos);
  }
  CHECK_THROWS_AS(extremal_sequence(1e-6, 1, 1.0, 1000), CapacityError);
}

TEST_CASE("extremal profile matches the closed form point by point") {
  for (int k = 1; k <= 3; ++k)
    for (double sigma : {1.0, 1.5, 2.0})
      for (double frac : {0.9, 0.5, 0.2}) {
        const double r = frac * admissible_radius_bound(k, sigma);
        const auto p = extremal_sequence(r, k, sigma);
        const auto pts = p.support();
        std::size_t brute = 0;
        (void)oracle_sum_theta4(r, k, sigma, &brute);
        CHECK(pts.size() == brute);
        CHECK(p.support_size() == brute);
        CHECK(pts.size() == lattice_ball(k, p.support_radius()).size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const auto l = pts.index(i);
          const double t = p.theta_sq(l);
          CHECK(t > 0);
          CHECK(t == doctest::Approx(oracle_theta_sq(r, k, sigma, l.coords())).epsilon(1e-11));
        }
      }
}

TEST_CASE("extremal profile is exchangeable at k = 2") {
  const auto p = extremal_sequence(0.1, 2, 1.0);
  const auto pts = p.support();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto c = pts.index(i).coords();
    const double t = p.theta_sq(pts.index(i));
    for (int sx : {-1, 1})
      for (int sy : {-1, 1}) {
        CHECK(p.theta_sq(FrequencyIndex({sx * c[0], sy * c[1]})) == t);
        CHECK(p.theta_sq(FrequencyIndex({sy * c[1], sx * c[0]})) == t);
      }
  }
  CHECK(pts.size() > 0);
}

TEST_CASE("a_exact against the lattice-sum oracle") {
  CHECK(a_exact(0.1, 1, 1.0, 0.01) == doctest::Approx(24.94).epsilon(1e-3));
  CHECK(a_exact(0.1, 1, 1.0, 0.01) == doctest::Approx(oracle_a(0.1, 1, 1.0, 0.01)).epsilon(1e-12));
  for (int k = 1; k <= 3; ++k)
    for (double r : {0.02, 0.05, 0.09}) {
      if (r >= admissible_radius_bound(k, 1.0)) continue;
      CHECK(a_exact(r, k, 1.0, 0.01) == doctest::Approx(oracle_a(r, k, 1.0, 0.01)).epsilon(1e-11));
    }
  CHECK(a_exact(0.01, 2, 2.0, 0.3) == doctest::Approx(oracle_a(0.01, 2, 2.0, 0.3)).epsilon(1e-11));
  CHECK_THROWS_AS(a_exact(0.2, 1, 1.0, 0.01), DomainError);
}

TEST_CASE("a_exact scales as eps^-2") {
  for (double r : {0.01, 0.05, 0.15}) {
    const double a = a_exact(r, 1, 1.0, 0.01);
    CHECK(a_exact(r, 1, 1.0, 0.005) == doctest::Approx(4 * a).epsilon(1e-13));
    for (double eps : {1e-5, 3e-3, 0.7, 2.0})
      CHECK(a_exact(r, 1, 1.0, eps) * eps * eps == doctest::Approx(a * 1e-4).epsilon(1e-12));
  }
}

TEST_CASE("a_exact is nondecreasing in r") {
  for (int k = 1; k <= 3; ++k)
    for (double sigma : {1.0, 2.0}) {
      double prev = 0;
      for (double r = 0.01; r < admissible_radius_bound(k, sigma); r *= 1.2) {
        const double a = a_exact(r, k, sigma, 0.01);
        CHECK(a >= prev);
        prev = a;
      }
    }
}

TEST_CASE("a_exact continuity") {
  const double a = a_exact(0.05, 1, 1.0, 0.01);
  const double ratio = a_exact(0.05 * 1.001, 1, 1.0, 0.01) / a;
  CHECK(ratio >= 1.0);
  CHECK(ratio <= 1.05);
}

TEST_CASE("asymptotic constants") {
  const double c2 = 3 * pi / std::pow(5.0, 1.5);
  CHECK(c2 == doctest::Approx(0.842977).epsilon(1e-6));
  CHECK(asymptotic_constant(1, 1.0, Regime::fixed_k) == doctest::Approx(std::sqrt(c2)).epsilon(1e-13));
  CHECK(asymptotic_constant(1, 1.0, Regime::fixed_k) == doctest::Approx(0.91814).epsilon(1e-5));
  for (int k : {1, 2, 3, 7})
    for (double s : {0.5, 1.0, 2.5}) {
      const double kk = k;
      const double fixed = std::pow(pi, kk) * (1 + 2 * s / kk) * std::tgamma(1 + kk / 2) /
                           (std::pow(1 + 4 * s / kk, 1 + kk / (2 * s)) * std::pow(std::tgamma(1.5), kk));
      CHECK(asymptotic_constant(k, s, Regime::fixed_k) == doctest::Approx(std::sqrt(fixed)).epsilon(1e-12));
      const double growing = std::pow(2 * pi * kk / std::exp(1.0), kk / 4) / std::exp(1.0) * std::pow(pi * kk, 0.25);
      CHECK(asymptotic_constant(k, s, Regime::growing_k) == doctest::Approx(growing).epsilon(1e-12));
    }
}

TEST_CASE("a_asymp examples") {
  const double want = 0.91814 * std::pow(0.1, 2.5) * 1e4;
  CHECK(want == doctest::Approx(29.03).epsilon(1e-3));
  CHECK(a_asymp(0.1, 1, 1.0, 0.01, Regime::fixed_k) == doctest::Approx(want).epsilon(1e-5));
  CHECK(a_asymp(0.0, 3, 1.0, 0.01, Regime::fixed_k) == 0.0);
  CHECK(a_asymp(0.0, 3, 1.0, 0.01, Regime::growing_k) == 0.0);
}

TEST_CASE("a_exact converges to a_asymp") {
  std::vector<double> dev;
  for (double r : {0.1, 0.05, 0.02, 0.01})
    dev.push_back(std::abs(a_exact(r, 1, 1.0, 0.01) / a_asymp(r, 1, 1.0, 0.01, Regime::fixed_k) - 1));
  for (std::size_t i = 1; i < dev.size(); ++i) CHECK(dev[i] < dev[i - 1]);
  CHECK(dev.back() <= 0.05);
}

TEST_CASE("solve_r_star") {
  const double a05 = a_asymp(0.05, 1, 1.0, 0.01, Regime::fixed_k);
  CHECK(solve_r_star(a05, 1, 1.0, 0.01, CalibrationMode::asymptotic) == doctest::Approx(0.05).epsilon(1e-8));
  CHECK(solve_r_star(29.03, 1, 1.0, 0.01, CalibrationMode::asymptotic) == doctest::Approx(0.1).epsilon(1e-3));
  for (auto mode : {CalibrationMode::exact, CalibrationMode::asymptotic})
    CHECK(solve_r_star(10, 1, 1.0, 0.01, mode) > solve_r_star(5, 1, 1.0, 0.01, mode));
  for (int k = 1; k <= 4; ++k)
    for (double target : {3.0, 5.5, 40.0}) {
      const double r = solve_r_star(target, k, 1.0, 5e-5, CalibrationMode::exact);
      CHECK(r > 0);
      CHECK(r < admissible_radius_bound(k, 1.0));
      CHECK(std::abs(a_exact(r, k, 1.0, 5e-5) - target) / target <= 1e-8);
    }
  const double growing = solve_r_star(7.0, 3, 1.0, 0.01, CalibrationMode::asymptotic, Regime::growing_k);
  CHECK(a_asymp(growing, 3, 1.0, 0.01, Regime::growing_k) == doctest::Approx(7.0).epsilon(1e-10));
}

TEST_CASE("solve_r_star reports unreachable targets") {
  const double top = a_exact(admissible_radius_bound(1, 1.0) * (1 - 1e-9), 1, 1.0, 0.01);
  CHECK_THROWS_AS(solve_r_star(top * 10, 1, 1.0, 0.01, CalibrationMode::exact), RangeError);
  CHECK_THROWS_AS(solve_r_star(-1, 1, 1.0, 0.01, CalibrationMode::exact), DomainError);
}

TEST_CASE("calibration_target") {
  CHECK(calibration_target(50, 1, 0.87) == doctest::Approx((1 + std::sqrt(0.13)) * std::sqrt(2 * std::log(50.0))));
  CHECK(calibration_target(50, 1, 0.87) == doctest::Approx(3.8055).epsilon(1e-4));
  CHECK(calibration_target(50, 1, 0.001) == doctest::Approx(5.5929).epsilon(1e-4));
  // near β = 1 the target approaches sqrt(2 log C)
  CHECK(calibration_target(4, 2, 1 - 1e-12) == doctest::Approx(std::sqrt(2 * std::log(6.0))).epsilon(1e-5));
}

TEST_CASE("beta_grid") {
  const auto g = beta_grid(20);
  REQUIRE(g.size() == 20);
  CHECK(g.front() == 0.001);
  CHECK(g.back() == 0.999);
  CHECK(g[1] - g[0] == doctest::Approx(0.0525263).epsilon(1e-6));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(beta_grid(2) == std::vector<double>{0.001, 0.999});
  CHECK_THROWS_AS(beta_grid(1), DomainError);
}

TEST_CASE("weights at r = 0.1") {
  const auto w = weights(0.1, 1, 1.0, 0.01);
  const double a = oracle_a(0.1, 1, 1.0, 0.01);
  const double w1 = oracle_theta_sq(0.1, 1, 1.0, {1}) / (2e-4 * a);
  CHECK(w1 == doctest::Approx(0.3891).epsilon(1e-3));
  CHECK(w.omega(FrequencyIndex({1})) == doctest::Approx(w1).epsilon(1e-12));
  CHECK(w.omega(FrequencyIndex({-1})) == doctest::Approx(w1).epsilon(1e-12));
  double s = 0;
  for (int l = 1; l <= 3; ++l) {
    const double v = oracle_theta_sq(0.1, 1, 1.0, {l}) / (2e-4 * a);
    CHECK(w.omega(FrequencyIndex({l})) == doctest::Approx(v).epsilon(1e-12));
    s += 2 * v * v;
  }
  CHECK(s == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w.sum_sq() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w.omega(FrequencyIndex({4})) == 0.0);
  CHECK(w.support_size() == 6);
  CHECK(w.max_weight() == doctest::Approx(w1).epsilon(1e-12));
}

TEST_CASE("weights are nonnegative and normalized") {
  for (int k = 1; k <= 4; ++k)
    for (double frac : {0.95, 0.6, 0.3, 0.1})
      for (double sigma : {1.0, 2.0}) {
        const double r = frac * admissible_radius_bound(k, sigma);
        const auto w = weights(r, k, sigma, 0.01);
        CHECK(std::abs(w.sum_sq() - 0.5) <= 1e-10 * 0.5);
        for (const auto& s : w.shells()) CHECK(s.value >= 0.0);
        CHECK(w.source_r() == r);
        CHECK(w.a_value() == doctest::Approx(a_exact(r, k, sigma, 0.01)).epsilon(1e-14));
      }
}
