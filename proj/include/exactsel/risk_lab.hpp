#pragma once

// Monte Carlo Hamming risk of the selector, the attenuation experiment, and
// classification of configurations against the selection and detection
// boundaries.

#include <cstdint>
#include <string>
#include <vector>

#include "exactsel/index_lattice.hpp"
#include "exactsel/selector.hpp"
#include "exactsel/signal_bank.hpp"

namespace exactsel {

enum class EnumerationMode { full, pool };

struct EnumerationSpec {
  EnumerationMode mode = EnumerationMode::pool;
  std::uint64_t pool_size = 2000;  // sampled inactive subsets per order
};

/// Σ |η̂_u - η_u| over the evaluated subsets.
std::int64_t hamming_loss(const SelectionResult& estimate, const SparsityPattern& truth);

struct OrderTally {
  int k = 0;
  std::uint64_t universe = 0;           // C(d, k)
  std::uint64_t active = 0;
  std::uint64_t inactive_evaluated = 0;
  std::uint64_t false_positives = 0;    // summed over cycles
  std::uint64_t misses = 0;             // summed over cycles
};

struct RiskReport {
  double err = 0.0;
  std::vector<std::int64_t> per_cycle_losses;
  int J = 0;
  double alpha = 1.0;
  EnumerationMode mode = EnumerationMode::pool;
  std::uint64_t pool_size = 0;
  std::uint64_t seed = 0;
  std::vector<OrderTally> orders;

  double standard_error() const;
  /// Expected false positives per cycle over the whole universe: the pooled
  /// inactive false-positive rate times the number of inactive subsets.
  double extrapolated_false_positives() const;
};

struct RiskOptions {
  int J = 15;
  std::uint64_t seed = 1;
  EnumerationSpec enumeration;
  int threads = 1;  // 0 = hardware concurrency
};

/// Subsets evaluated for order k: all of them in full mode, or the actives plus
/// a reproducible uniform sample of the inactives in pool mode. Sorted by rank.
std::vector<Subset> evaluation_subsets(const SparsityPattern& pattern, int k, const EnumerationSpec& e,
                                       std::uint64_t seed);

RiskReport estimate_risk(const SparsityPattern& pattern, const Selector& selector, const RiskOptions& opt);

/// One report per alpha; only the component on `target` is scaled. All alphas
/// share the noise of each cycle.
std::vector<RiskReport> attenuation_experiment(const std::vector<double>& alphas, const SparsityPattern& pattern,
                                               const Selector& selector, const RiskOptions& opt,
                                               const Subset& target);

enum class Verdict { selectable, detectable_only, undetectable, boundary };
std::string to_string(Verdict v);

struct RegimeVerdict {
  double ratio = 0.0;
  double selection_threshold = 0.0;  // √2 (1 + √(1 - β))
  double detection_threshold = 0.0;  // √2
  Verdict verdict = Verdict::boundary;
};

double selection_boundary(double beta);
double detection_boundary();

RegimeVerdict classify_ratio(double ratio, double beta, double band = 0.05);

/// ratio = min_k a_exact(r_k, k, σ, ε) / sqrt(log C(d, k)) with r_family[k-1] = r_k.
RegimeVerdict classify_regime(const std::vector<double>& r_family, const DimensionSpec& spec,
                              double band = 0.05);

struct BoundaryGrid {
  std::vector<double> betas;
  std::vector<double> sigmas{1.0};
  std::vector<int> ds{50};
  std::vector<int> ks{1};
  // Radii are placed so that the asymptotic ratio runs geometrically over
  // [ratio_lo, ratio_hi]; the reported ratio uses the exact lattice sum.
  int r_points = 50;
  double ratio_lo = 0.5;
  double ratio_hi = 4.0;
  double epsilon = 0.01;
  double band = 0.05;
};

struct BoundaryRow {
  double beta = 0.0;
  double sigma = 0.0;
  int d = 0;
  int k = 0;
  double r = 0.0;
  double ratio = 0.0;
  Verdict verdict = Verdict::boundary;
};

std::vector<BoundaryRow> boundary_sweep(const BoundaryGrid& grid);

}  // namespace exactsel
