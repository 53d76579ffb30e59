#pragma once

// Subsets u_k of {1..d}, frequency lattice points with all-nonzero coordinates,
// and the radial (per-shell) bookkeeping used by every lattice sum downstream.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace exactsel {

inline constexpr std::size_t kDefaultPointBudget = 10'000'000;

/// A k-element subset of {1, ..., d}, indices 1-based and strictly increasing.
class Subset {
 public:
  Subset() = default;
  // Throws DomainError unless indices are strictly increasing within [1, d].
  Subset(std::vector<int> indices, int d);

  int k() const { return static_cast<int>(indices_.size()); }
  const std::vector<int>& indices() const { return indices_; }
  std::string to_string() const;  // "{1,2,5}"

  friend bool operator==(const Subset&, const Subset&) = default;
  friend auto operator<=>(const Subset& a, const Subset& b) { return a.indices_ <=> b.indices_; }

 private:
  std::vector<int> indices_;
};

/// Nonzero coordinates (l_{j_1}, ..., l_{j_k}) of a point of Z̊_{u_k}.
class FrequencyIndex {
 public:
  FrequencyIndex() = default;
  explicit FrequencyIndex(std::vector<int> coords);  // throws DomainError on a zero coordinate

  int k() const { return static_cast<int>(coords_.size()); }
  const std::vector<int>& coords() const { return coords_; }
  std::int64_t squared_norm() const;
  int max_abs() const;

  friend bool operator==(const FrequencyIndex&, const FrequencyIndex&) = default;
  friend auto operator<=>(const FrequencyIndex& a, const FrequencyIndex& b) {
    return a.coords_ <=> b.coords_;
  }

 private:
  std::vector<int> coords_;
};

struct DimensionSpec {
  int d = 1;
  int s = 1;
  double beta = 0.5;
  double sigma = 1.0;
  double epsilon = 1.0;

  void validate() const;  // throws DomainError
};

/// log C(d, k), evaluated without forming the integer.
double log_binomial(std::int64_t d, std::int64_t k);

/// C(d, k) when it fits in 63 bits.
std::optional<std::uint64_t> binomial_u64(std::int64_t d, std::int64_t k);

/// N_{k,d} = round(C(d,k)^{1-beta}), ties away from zero, never below 1.
std::int64_t active_count(std::int64_t d, std::int64_t k, double beta);

/// Points of Z̊^k strictly inside the Euclidean ball of radius R, lexicographic
/// order, stored flat (k coordinates per point).
class LatticeBall {
 public:
  LatticeBall(int k, double radius, std::vector<std::int32_t> coords);

  int k() const { return k_; }
  double radius() const { return radius_; }
  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(k_); }
  std::span<const std::int32_t> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(k_), static_cast<std::size_t>(k_)};
  }
  FrequencyIndex index(std::size_t i) const;

 private:
  int k_;
  double radius_;
  std::vector<std::int32_t> coords_;
};

/// Upper bound on |lattice_ball(k, R)|: the volume of the k-ball of radius R.
double lattice_ball_volume_bound(int k, double radius);

// Throws CapacityError when the volume bound exceeds `point_budget`.
LatticeBall lattice_ball(int k, double radius, std::size_t point_budget = kDefaultPointBudget);

/// Largest |l_j| over points of Z̊^k with squared norm below radius^2 (0 if empty).
int lattice_ball_max_abs(int k, double radius);

// ---------------------------------------------------------------------------
// Radial aggregation. For a separable f(ℓ) = Π_p f_p(l_p) over Z̊^k,
//   F(q) = Σ_{ℓ ∈ Z̊^k, |ℓ|² = q} f(ℓ)
// is a convolution of the one-dimensional folded series F_p(l²) = f_p(l) + f_p(-l).

/// Folded one-dimensional factor: entry [l] holds f(l) + f(-l) for l >= 1, [0] unused.
using FoldedFactor = std::vector<double>;

/// Dense result over q in [0, q_limit).
std::vector<double> radial_aggregate(std::span<const FoldedFactor> factors, std::int64_t q_limit);

/// Number of points of Z̊^k on each sphere |ℓ|² = q. The returned table covers at
/// least [0, q_limit) and may be longer. Cached per k, thread-safe.
std::shared_ptr<const std::vector<double>> shell_counts(int k, std::int64_t q_limit);

// ---------------------------------------------------------------------------
// Subset enumeration.

/// Lexicographic rank of a subset among all k-subsets of {1..d}; needs C(d,k) < 2^63.
std::uint64_t subset_rank(const Subset& u, int d);
Subset subset_unrank(std::uint64_t rank, int d, int k);

struct FullEnumeration {};
struct PoolEnumeration {
  std::uint64_t size = 0;
  std::uint64_t seed = 0;
};

/// Restartable stream of subsets. Full mode walks all C(d,k) subsets in
/// lexicographic order; pool mode walks a reproducible uniform sample (without
/// replacement) of the requested size, also in lexicographic order.
class SubsetStream {
 public:
  SubsetStream(int d, int k, FullEnumeration);
  SubsetStream(int d, int k, PoolEnumeration pool);

  std::optional<Subset> next();
  void restart();
  std::uint64_t size() const { return size_; }
  bool pooled() const { return pooled_; }

 private:
  int d_;
  int k_;
  std::uint64_t size_ = 0;
  std::uint64_t cursor_ = 0;
  bool pooled_ = false;
  std::vector<std::uint64_t> ranks_;  // pool mode only
  std::vector<int> current_;          // full mode only
};

/// Sample `count` distinct ranks uniformly from [0, universe), sorted ascending.
std::vector<std::uint64_t> sample_ranks(std::uint64_t universe, std::uint64_t count, std::uint64_t seed);

}  // namespace exactsel
