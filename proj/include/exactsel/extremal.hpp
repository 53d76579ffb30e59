#pragma once

// The extremal sequence θ*(r) of the Sobolev-ellipsoid shell problem, the
// functional a(r), test weights ω, and the calibration of radii r* on a grid of
// sparsity indices.
//
// θ*² depends on ℓ only through q = Σ l_j², so profiles are stored per shell
// (q, number of lattice points on the shell, value). Explicit point sets are
// materialized on demand through support().

#include <cstddef>
#include <cstdint>
#include <vector>

#include "exactsel/index_lattice.hpp"

namespace exactsel {

enum class Regime { fixed_k, growing_k };
enum class CalibrationMode { exact, asymptotic };

/// Right end of the admissible radius interval, (2π)^{-σ} k^{-σ/2}.
double admissible_radius_bound(int k, double sigma);

/// c_ℓ = (Σ_j (2π l_j)²)^{σ/2}.
double sobolev_coeff(const FrequencyIndex& l, double sigma);

/// c_ℓ² for any ℓ with Σ l_j² = q.
double sobolev_coeff_sq(std::int64_t q, double sigma);

/// Radius of the extremal support, (1 + 4σ/k)^{1/(2σ)} / (2π r^{1/σ}).
double extremal_support_radius(double r, int k, double sigma);

struct RadialShell {
  std::int64_t q = 0;   // squared Euclidean norm shared by the shell
  double count = 0.0;   // lattice points of Z̊^k on the shell
  double value = 0.0;   // θ*² or ω, depending on the owner
};

class ExtremalProfile {
 public:
  ExtremalProfile(double r, int k, double sigma, std::vector<RadialShell> shells);

  double r() const { return r_; }
  int k() const { return k_; }
  double sigma() const { return sigma_; }
  double support_radius() const { return support_radius_; }
  const std::vector<RadialShell>& shells() const { return shells_; }

  /// θ*² at ℓ; zero outside the support.
  double theta_sq(const FrequencyIndex& l) const;
  double theta_sq_at(std::int64_t q) const;

  std::size_t support_size() const;
  LatticeBall support(std::size_t point_budget = kDefaultPointBudget) const;

  /// Σ_ℓ (θ*²_ℓ)², accumulated with compensation.
  double sum_theta4() const;

 private:
  double r_;
  int k_;
  double sigma_;
  double support_radius_;
  std::vector<RadialShell> shells_;
};

/// Throws DomainError unless 0 < r < admissible_radius_bound(k, sigma), and
/// CapacityError when the support spans more than `shell_budget` squared radii.
ExtremalProfile extremal_sequence(double r, int k, double sigma,
                                  std::size_t shell_budget = kDefaultPointBudget);

/// a(r) from the lattice sum: sqrt(Σ θ*⁴ / (2ε⁴)).
double a_exact(double r, int k, double sigma, double epsilon);

/// Leading-order constant C with a(r) ~ C r^{2+k/(2σ)} ε^{-2}.
double asymptotic_constant(int k, double sigma, Regime regime);

double a_asymp(double r, int k, double sigma, double epsilon, Regime regime);

/// r* with a(r*) = target_a to 1e-8 relative. Exact mode bisects the lattice
/// sum over the admissible interval; asymptotic mode inverts C r^p ε^{-2}.
/// Throws RangeError when the exact target is out of reach.
double solve_r_star(double target_a, int k, double sigma, double epsilon, CalibrationMode mode,
                    Regime regime = Regime::fixed_k);

/// (1 + sqrt(1 - β)) sqrt(2 log C(d, k)).
double calibration_target(std::int64_t d, std::int64_t k, double beta);

/// β_m = 0.001 + (m-1) 0.998/(M-1), m = 1..M.
std::vector<double> beta_grid(int M);

class WeightProfile {
 public:
  WeightProfile(double source_r, double a_value, int k, double sigma, double epsilon,
                double support_radius, std::vector<RadialShell> shells);

  double source_r() const { return source_r_; }
  double a_value() const { return a_value_; }
  int k() const { return k_; }
  double sigma() const { return sigma_; }
  double epsilon() const { return epsilon_; }
  double support_radius() const { return support_radius_; }
  const std::vector<RadialShell>& shells() const { return shells_; }

  double omega(const FrequencyIndex& l) const;
  double omega_at(std::int64_t q) const;
  double sum_sq() const;  // Σ ω², 1/2 by construction
  double max_weight() const;
  std::size_t support_size() const;

 private:
  double source_r_;
  double a_value_;
  int k_;
  double sigma_;
  double epsilon_;
  double support_radius_;
  std::vector<RadialShell> shells_;
};

/// ω_ℓ = θ*²_ℓ / (2 ε² a_exact(r*)).
WeightProfile weights(double r_star, int k, double sigma, double epsilon);

}  // namespace exactsel
