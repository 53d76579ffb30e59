#pragma once

// Composite Gauss-Legendre rules on [0, 1].

#include <functional>
#include <string>
#include <vector>

namespace exactsel {

struct QuadratureSpec {
  int panels = 64;
  int nodes = 16;  // per panel

  int total_nodes() const { return panels * nodes; }
  std::string signature() const;  // "gl64x16"

  /// A rule resolving every frequency |l| <= L: one oscillation per panel at most.
  static QuadratureSpec covering(int L);

  friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

struct QuadratureRule {
  std::vector<double> t;  // nodes in (0, 1), ascending
  std::vector<double> w;  // weights, summing to 1
};

/// Cached; throws DomainError for non-positive panel or node counts.
const QuadratureRule& quadrature_rule(const QuadratureSpec& spec);

double integrate(const std::function<double(double)>& f, const QuadratureSpec& spec);

}  // namespace exactsel
