#include "exactsel/quadrature.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include <boost/math/special_functions/legendre.hpp>

#include "exactsel/errors.hpp"
#include "kernels/reduction.hpp"

namespace exactsel {

std::string QuadratureSpec::signature() const {
  return "gl" + std::to_string(panels) + "x" + std::to_string(nodes);
}

QuadratureSpec QuadratureSpec::covering(int L) { return {std::max(64, L), 16}; }

namespace {

// Gauss-Legendre nodes and weights on [-1, 1], ascending.
std::pair<std::vector<double>, std::vector<double>> legendre_rule(int n) {
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);  // nonnegative half
  std::vector<double> x, w;
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime(n, z);
    const double wz = 2.0 / ((1.0 - z * z) * dp * dp);
    x.push_back(z);
    w.push_back(wz);
    if (z != 0.0) {
      x.push_back(-z);
      w.push_back(wz);
    }
  }
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> xs, ws;
  for (std::size_t i : order) {
    xs.push_back(x[i]);
    ws.push_back(w[i]);
  }
  return {xs, ws};
}

}  // namespace

const QuadratureRule& quadrature_rule(const QuadratureSpec& spec) {
  if (spec.panels < 1 || spec.nodes < 1) throw DomainError("quadrature needs positive panels and nodes");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{spec.panels, spec.nodes}];
  if (slot) return *slot;
  const auto [x, w] = legendre_rule(spec.nodes);
  auto rule = std::make_unique<QuadratureRule>();
  const double h = 1.0 / spec.panels;
  rule->t.reserve(static_cast<std::size_t>(spec.total_nodes()));
  rule->w.reserve(static_cast<std::size_t>(spec.total_nodes()));
  for (int p = 0; p < spec.panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (std::size_t j = 0; j < x.size(); ++j) {
      rule->t.push_back(mid + 0.5 * h * x[j]);
      rule->w.push_back(0.5 * h * w[j]);
    }
  }
  slot = std::move(rule);
  return *slot;
}

double integrate(const std::function<double(double)>& f, const QuadratureSpec& spec) {
  const QuadratureRule& rule = quadrature_rule(spec);
  kernels::NeumaierSum acc;
  for (std::size_t i = 0; i < rule.t.size(); ++i) acc.add(rule.w[i] * f(rule.t[i]));
  return acc.value();
}

}  // namespace exactsel
