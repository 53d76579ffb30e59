#pragma once

// Test functions g_1..g_9, their Fourier coefficients on the trigonometric
// basis, product-form ANOVA components and sparsity patterns.
//
// Basis on [0, 1]: φ_0 = 1, φ_l = √2 cos(2πlt), φ_{-l} = √2 sin(2πlt) for l > 0.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "exactsel/index_lattice.hpp"
#include "exactsel/quadrature.hpp"

namespace exactsel {

inline constexpr int kTestFunctionCount = 9;

double eval_g(int i, double t);
double basis_phi(int l, double t);

/// ∫ g_i φ_l by the composite rule `quad`; needs quad.total_nodes() >= 4|l| + 16.
double fourier_coeff_1d(int i, int l, const QuadratureSpec& quad = {});

/// Coefficients of every g_i for |l| <= kMaxFrequency, computed once per
/// function with a single rule (QuadratureSpec::covering(kMaxFrequency)) by the
/// batched Fourier sweep kernel.
class CoefficientBank {
 public:
  static constexpr int kMaxFrequency = 1024;

  static const CoefficientBank& shared();

  double coeff(int i, int l) const;
  /// Entry [l] = θ_i(l)² + θ_i(-l)² for l = 1..n; [0] unused.
  FoldedFactor folded_energy(int i, int n) const;
  QuadratureSpec rule() const { return QuadratureSpec::covering(kMaxFrequency); }

 private:
  CoefficientBank() = default;
  const std::vector<double>& series(int i) const;  // index l + kMaxFrequency
};

struct ComponentSpec {
  Subset subset;
  std::vector<int> factor_ids;  // g index per coordinate of subset
  double amplitude = 1.0;

  void validate() const;  // throws DomainError
};

/// amplitude × Π_p fourier_coeff_1d(factor_ids[p], l_p, quad).
double product_coeff(const ComponentSpec& spec, const FrequencyIndex& l, const QuadratureSpec& quad = {});

/// Same product from the coefficient bank.
double product_coeff(const ComponentSpec& spec, const FrequencyIndex& l, const CoefficientBank& bank);

struct OrthogonalityReport {
  bool pass = false;
  double residual = 0.0;  // |∫ g_i|
};

OrthogonalityReport orthogonality_check(int i, double tol, const QuadratureSpec& quad = {});

class CoefficientTable {
 public:
  CoefficientTable() = default;
  explicit CoefficientTable(Subset owner) : owner_(std::move(owner)) {}

  const Subset& owner() const { return owner_; }
  const std::map<FrequencyIndex, double>& entries() const { return entries_; }
  void set(const FrequencyIndex& l, double theta) { entries_[l] = theta; }
  std::size_t size() const { return entries_.size(); }

  /// One record per line: "{1,2};3,-1;<theta>".
  void write_text(std::ostream& os) const;

 private:
  Subset owner_;
  std::map<FrequencyIndex, double> entries_;
};

/// Coefficients of a component over Z̊^k ∩ [-n, n]^k; CapacityError above `budget` entries.
CoefficientTable coefficient_table(const ComponentSpec& spec, int n,
                                   std::size_t budget = kDefaultPointBudget);

/// Σ θ_ℓ² c_ℓ² over the table.
double sobolev_norm(const CoefficientTable& table, double sigma);

/// Σ θ_ℓ² c_ℓ² over Z̊^k ∩ [-n, n]^k without materializing the table.
double component_sobolev_norm(const ComponentSpec& spec, int n, double sigma);

/// E[q] = Σ_{|ℓ|² = q} θ_ℓ² for q < q_limit (dense).
std::vector<double> signal_shell_energy(const ComponentSpec& spec, std::int64_t q_limit);

class SparsityPattern {
 public:
  SparsityPattern(int d, int s);

  int d() const { return d_; }
  int s() const { return s_; }

  void add(ComponentSpec component);  // rejects duplicates and out-of-range orders
  const std::vector<ComponentSpec>& actives(int k) const;
  const ComponentSpec* find(const Subset& u) const;
  bool is_active(const Subset& u) const { return find(u) != nullptr; }
  std::size_t total_active() const;

  /// Copy with the amplitude of the component on `u` multiplied by alpha.
  SparsityPattern attenuated(const Subset& u, double alpha) const;

 private:
  int d_;
  int s_;
  std::vector<std::vector<ComponentSpec>> by_order_;  // index k - 1
};

/// The reference simulation layout; requires d in {50, 100, 200}, s = 4, beta = 0.87.
SparsityPattern build_pattern(const DimensionSpec& spec);

/// Explicit component list.
SparsityPattern build_pattern(const DimensionSpec& spec, const std::vector<ComponentSpec>& components);

}  // namespace exactsel
