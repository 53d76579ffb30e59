#pragma once

// Observations in the sequence-space model, the weighted chi-square statistics
// S_{u,m}, thresholds and the adaptive selector.
//
// Every statistic depends on an observation only through the per-shell sums
//   Y_q = Σ_{|ℓ|² = q} ((X_ℓ / ε)² - 1),
// so S_m = Σ_q ω_m(q) Y_q = (W Y)_m. Two interchangeable noise paths produce Y:
//   coefficient: draw X_ℓ for every lattice point of the weight supports;
//   shell:       draw Y_q + N_q directly as a noncentral χ² with N_q degrees of
//                freedom and noncentrality Σ_{|ℓ|² = q} θ_ℓ² / ε².
// Both give the same joint law for (S_1, ..., S_M).

#include <cstdint>
#include <optional>
#include <vector>

#include "exactsel/extremal.hpp"
#include "exactsel/index_lattice.hpp"
#include "exactsel/random.hpp"
#include "exactsel/signal_bank.hpp"

namespace exactsel {

enum class EpsHatRule { fixed, growing_s };
enum class TruncationMode { preset, rule };
enum class NoiseModel { automatic, coefficient, shell };

/// fixed: 1/sqrt(log C(d,k)); growing_s: max(1/sqrt(log d), log s · log log d / log d).
double epsilon_hat(std::int64_t d, std::int64_t k, EpsHatRule rule, std::int64_t s = 1);

/// sqrt((2 + eps_hat)(log C(d,k) + log M)).
double threshold(std::int64_t d, std::int64_t k, int M, double eps_hat);

/// Reference truncation radii for k = 1..4 at σ = 1, ε = 5e-5.
int preset_truncation(int k);

struct SelectorConfig {
  DimensionSpec dim;
  int M = 20;
  EpsHatRule eps_hat_rule = EpsHatRule::fixed;
  TruncationMode truncation = TruncationMode::rule;
  CalibrationMode calibration = CalibrationMode::exact;
  NoiseModel noise = NoiseModel::automatic;
  std::size_t explicit_point_limit = 4096;  // automatic: coefficient path up to this many points

  void validate() const;
};

/// Shells of the union of the M weight supports and the M x shells weight matrix.
struct ShellBasis {
  std::vector<std::int64_t> q;
  std::vector<double> count;
  std::vector<double> W;  // row-major, M rows
  std::size_t shells() const { return q.size(); }
};

struct OrderSetup {
  int k = 0;
  double log_binom = 0.0;
  double eps_hat = 0.0;
  double threshold = 0.0;
  int truncation_n = 0;
  double support_radius = 0.0;  // largest weight-support radius over the grid
  std::vector<double> betas;
  std::vector<double> targets;
  std::vector<double> r_stars;
  std::vector<WeightProfile> profiles;
  ShellBasis basis;
  bool coefficient_path = false;
  std::optional<LatticeBall> points;  // shell-sorted support points, coefficient path only
  std::vector<std::uint32_t> offsets; // shell boundaries into points, coefficient path only
};

/// Calibrated grid for every order k = 1..s.
struct GridSpec {
  int M = 0;
  std::vector<double> betas;
  std::vector<std::vector<double>> r_stars;  // [k-1][m-1]
  std::vector<double> eps_hat;               // [k-1]
};

/// Observed coefficients of one subset on the union of the weight supports,
/// stored shell by shell.
class Observation {
 public:
  Observation(Subset owner, double epsilon, int truncation_n, LatticeBall points,
              std::vector<std::uint32_t> offsets, std::vector<std::int64_t> shell_q, std::vector<double> values);

  const Subset& owner() const { return owner_; }
  double epsilon() const { return epsilon_; }
  int truncation_n() const { return truncation_n_; }
  const LatticeBall& points() const { return points_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::uint32_t>& offsets() const { return offsets_; }
  const std::vector<std::int64_t>& shell_q() const { return shell_q_; }
  std::size_t size() const { return values_.size(); }

  std::optional<double> value(const FrequencyIndex& l) const;

 private:
  Subset owner_;
  double epsilon_;
  int truncation_n_;
  LatticeBall points_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::int64_t> shell_q_;
  std::vector<double> values_;
};

/// Σ ω_ℓ ((X_ℓ / ε)² - 1); DomainError when the weight support is not fully observed.
double statistic_S(const Observation& obs, const WeightProfile& w);

struct SubsetOutcome {
  Subset subset;
  bool selected = false;
  int argmax = -1;          // 0-based grid index of the largest statistic, -1 when M = 0
  std::vector<double> S;    // one per grid point
};

struct SelectionResult {
  std::vector<SubsetOutcome> outcomes;  // in evaluation order
  std::size_t selected_count() const;
};

/// Calibrated selector for a fixed configuration.
class Selector {
 public:
  explicit Selector(SelectorConfig config);

  const SelectorConfig& config() const { return config_; }
  const OrderSetup& order(int k) const;
  GridSpec grid() const;

  /// X_ℓ = η θ_ℓ + ε ξ_ℓ on the union of weight supports of order u.k(). The
  /// noise stream is addressed by (seed, u) only.
  Observation simulate_observation(const Subset& u, const SparsityPattern& pattern, std::uint64_t seed) const;

  /// Per-shell sums Y_q of u in the order's basis, by the configured noise path.
  std::vector<double> shell_statistics(const Subset& u, const SparsityPattern& pattern, std::uint64_t seed) const;

  /// Y_q from an explicit observation.
  std::vector<double> shell_statistics(const Observation& obs) const;

  /// S_m = (W Y)_m and the selection decision.
  SubsetOutcome decide(const Subset& u, const std::vector<double>& Y) const;

  SubsetOutcome evaluate(const Subset& u, const SparsityPattern& pattern, std::uint64_t seed) const;

  SelectionResult select(const std::vector<Observation>& observations) const;

  /// Noncentrality Σ_{|ℓ|²=q} θ_ℓ² / ε² per basis shell; zeros for inactive u.
  std::vector<double> shell_noncentrality(const Subset& u, const SparsityPattern& pattern) const;

 private:
  SelectorConfig config_;
  std::vector<OrderSetup> orders_;
};

/// Seed of the noise stream of subset u under master seed `seed`.
std::uint64_t subset_stream_seed(std::uint64_t seed, const Subset& u, int d);

struct TailAuditReport {
  double T = 0.0;
  std::uint64_t trials = 0;
  double upper_exceedance = 0.0;  // P0(S > T)
  double reference = 0.0;         // exp(-T²/2)
  bool regime_ok = true;          // T · max ω <= 0.1
  std::optional<double> signal_mean;             // E_θ S
  std::optional<double> lower_exceedance;        // Pθ(S - E_θ S < -T)
};

/// Monte Carlo of S under the null (and optionally under a signal given as
/// per-shell noncentralities aligned with w.shells()).
TailAuditReport tail_bound_audit(double T, std::uint64_t trials, std::uint64_t seed, const WeightProfile& w,
                                 const std::vector<double>* signal_lambda = nullptr);

}  // namespace exactsel
