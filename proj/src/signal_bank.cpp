#include "exactsel/signal_bank.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>
#include <shared_mutex>
#include <tuple>

#include "exactsel/errors.hpp"
#include "exactsel/extremal.hpp"
#include "exactsel/kernels.hpp"
#include "kernels/reduction.hpp"

namespace exactsel {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

void check_function_id(int i) {
  if (i < 1 || i > kTestFunctionCount)
    throw DomainError("test function index " + std::to_string(i) + " outside [1, 9]");
}

}  // namespace

double eval_g(int i, double t) {
  check_function_id(i);
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("test functions are defined on [0, 1]");
  switch (i) {
    case 1: {
      const double b = t - 0.5;
      return t * t * (std::exp2(t - 1.0) - b * b) * std::exp(t) - 0.5424;
    }
    case 2:
      return t * t * (std::exp2(t - 1.0) - std::pow(t - 1.0, 5)) - 0.2887;
    case 3:
      return 1.5 * t * t * std::exp2(t - 1.0) * std::cos(15.0 * t) - 0.05011;
    case 4:
      return t - 0.5;
    case 5:
      return 5.0 * std::pow(t - 0.7, 3) + 0.29;
    case 6:
      return 2.0 * (t - 0.4) * (t - 0.4) - 0.1867;
    case 7:
      return 0.7 * std::pow(t * t - 0.1, 3) - 0.0643;
    case 8:
      return 10.0 * std::pow(t * t - 0.5, 5) + 0.068;
    default:
      return 3.0 * std::pow(t - 0.8, 4) - 0.1968;
  }
}

double basis_phi(int l, double t) {
  if (l == 0) return 1.0;
  if (l > 0) return kSqrt2 * std::cos(2.0 * kPi * l * t);
  return kSqrt2 * std::sin(2.0 * kPi * (-l) * t);
}

double fourier_coeff_1d(int i, int l, const QuadratureSpec& quad) {
  check_function_id(i);
  // Four nodes per period. Two per period (plus a margin) passes aliasing but
  // the 64x16 rule is then off by 1e-4 at |l| = 500.
  const long need = 4L * std::abs(static_cast<long>(l)) + 16;
  if (quad.total_nodes() < need)
    throw DomainError("quadrature " + quad.signature() + " has " + std::to_string(quad.total_nodes()) +
                      " nodes; frequency " + std::to_string(l) + " needs at least " + std::to_string(need));

  static std::shared_mutex mutex;
  static std::map<std::tuple<int, int, int, int>, double> cache;
  const auto key = std::make_tuple(i, l, quad.panels, quad.nodes);
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const QuadratureRule& rule = quadrature_rule(quad);
  kernels::NeumaierSum acc;
  for (std::size_t j = 0; j < rule.t.size(); ++j) acc.add(rule.w[j] * eval_g(i, rule.t[j]) * basis_phi(l, rule.t[j]));
  const double value = acc.value();
  std::unique_lock lock(mutex);
  cache.emplace(key, value);
  return value;
}

const CoefficientBank& CoefficientBank::shared() {
  static const CoefficientBank bank;
  return bank;
}

const std::vector<double>& CoefficientBank::series(int i) const {
  check_function_id(i);
  static std::array<std::once_flag, kTestFunctionCount> flags;
  static std::array<std::vector<double>, kTestFunctionCount> data;
  const auto slot = static_cast<std::size_t>(i - 1);
  std::call_once(flags[slot], [&] {
    const QuadratureRule& q = quadrature_rule(rule());
    const std::size_t n = q.t.size();
    std::vector<double> v(n), theta(n);
    kernels::NeumaierSum mean;
    for (std::size_t j = 0; j < n; ++j) {
      const double g = q.w[j] * eval_g(i, q.t[j]);
      mean.add(g);
      v[j] = kSqrt2 * g;
      theta[j] = 2.0 * kPi * q.t[j];
    }
    std::vector<double> cos_out(kMaxFrequency), sin_out(kMaxFrequency);
    kernels::active().fourier_sweep(v.data(), theta.data(), n, kMaxFrequency, cos_out.data(), sin_out.data());
    auto& s = data[slot];
    s.assign(2 * kMaxFrequency + 1, 0.0);
    s[kMaxFrequency] = mean.value();
    for (int l = 1; l <= kMaxFrequency; ++l) {
      s[static_cast<std::size_t>(kMaxFrequency + l)] = cos_out[static_cast<std::size_t>(l - 1)];
      s[static_cast<std::size_t>(kMaxFrequency - l)] = sin_out[static_cast<std::size_t>(l - 1)];
    }
  });
  return data[slot];
}

double CoefficientBank::coeff(int i, int l) const {
  if (std::abs(l) > kMaxFrequency)
    throw DomainError("frequency " + std::to_string(l) + " beyond the coefficient bank limit " +
                      std::to_string(kMaxFrequency));
  return series(i)[static_cast<std::size_t>(l + kMaxFrequency)];
}

FoldedFactor CoefficientBank::folded_energy(int i, int n) const {
  if (n > kMaxFrequency) throw DomainError("folded energy beyond the coefficient bank limit");
  const auto& s = series(i);
  FoldedFactor f(static_cast<std::size_t>(n) + 1, 0.0);
  for (int l = 1; l <= n; ++l) {
    const double c = s[static_cast<std::size_t>(kMaxFrequency + l)];
    const double sn = s[static_cast<std::size_t>(kMaxFrequency - l)];
    f[static_cast<std::size_t>(l)] = c * c + sn * sn;
  }
  return f;
}

void ComponentSpec::validate() const {
  if (subset.k() == 0) throw DomainError("component needs a nonempty subset");
  if (static_cast<int>(factor_ids.size()) != subset.k())
    throw DomainError("component " + subset.to_string() + " has " + std::to_string(factor_ids.size()) +
                      " factors for " + std::to_string(subset.k()) + " coordinates");
  for (int id : factor_ids) check_function_id(id);
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw DomainError("component amplitude must be positive");
}

double product_coeff(const ComponentSpec& spec, const FrequencyIndex& l, const QuadratureSpec& quad) {
  if (l.k() != spec.subset.k()) throw DomainError("frequency index arity differs from the component order");
  double v = 1.0;
  for (std::size_t p = 0; p < spec.factor_ids.size(); ++p)
    v *= fourier_coeff_1d(spec.factor_ids[p], l.coords()[p], quad);
  return spec.amplitude * v;
}

double product_coeff(const ComponentSpec& spec, const FrequencyIndex& l, const CoefficientBank& bank) {
  if (l.k() != spec.subset.k()) throw DomainError("frequency index arity differs from the component order");
  // amplitude last, so attenuation scales every coefficient exactly
  double v = 1.0;
  for (std::size_t p = 0; p < spec.factor_ids.size(); ++p) v *= bank.coeff(spec.factor_ids[p], l.coords()[p]);
  return spec.amplitude * v;
}

OrthogonalityReport orthogonality_check(int i, double tol, const QuadratureSpec& quad) {
  const double residual = std::abs(fourier_coeff_1d(i, 0, quad));
  return {residual <= tol, residual};
}

void CoefficientTable::write_text(std::ostream& os) const {
  const auto old = os.precision(17);
  for (const auto& [l, theta] : entries_) {
    os << owner_.to_string() << ';';
    for (std::size_t p = 0; p < l.coords().size(); ++p) os << (p ? "," : "") << l.coords()[p];
    os << ';' << theta << '\n';
  }
  os.precision(old);
}

CoefficientTable coefficient_table(const ComponentSpec& spec, int n, std::size_t budget) {
  spec.validate();
  if (n < 1) throw DomainError("truncation n must be positive");
  const int k = spec.subset.k();
  const double count = std::pow(2.0 * n, k);
  if (count > static_cast<double>(budget))
    throw CapacityError("coefficient table of " + std::to_string(static_cast<long long>(count)) +
                        " entries exceeds the budget of " + std::to_string(budget));
  const CoefficientBank& bank = CoefficientBank::shared();
  CoefficientTable table(spec.subset);
  std::vector<int> coords(static_cast<std::size_t>(k), -n);
  for (;;) {
    FrequencyIndex l(coords);
    table.set(l, product_coeff(spec, l, bank));
    int p = k - 1;
    for (; p >= 0; --p) {
      auto& c = coords[static_cast<std::size_t>(p)];
      c = (c == -1) ? 1 : c + 1;
      if (c <= n) break;
      c = -n;
    }
    if (p < 0) break;
  }
  return table;
}

double sobolev_norm(const CoefficientTable& table, double sigma) {
  kernels::NeumaierSum acc;
  for (const auto& [l, theta] : table.entries()) acc.add(theta * theta * sobolev_coeff_sq(l.squared_norm(), sigma));
  return acc.value();
}

namespace {

std::vector<FoldedFactor> energy_factors(const ComponentSpec& spec, int n) {
  const CoefficientBank& bank = CoefficientBank::shared();
  std::vector<FoldedFactor> factors;
  for (int id : spec.factor_ids) factors.push_back(bank.folded_energy(id, n));
  const double a2 = spec.amplitude * spec.amplitude;
  for (double& x : factors.front()) x *= a2;
  return factors;
}

}  // namespace

double component_sobolev_norm(const ComponentSpec& spec, int n, double sigma) {
  spec.validate();
  const auto k = static_cast<std::int64_t>(spec.subset.k());
  const std::int64_t q_limit = k * n * n + 1;
  const std::vector<double> energy = radial_aggregate(energy_factors(spec, n), q_limit);
  kernels::NeumaierSum acc;
  for (std::int64_t q = 1; q < q_limit; ++q)
    if (energy[static_cast<std::size_t>(q)] != 0.0)
      acc.add(energy[static_cast<std::size_t>(q)] * sobolev_coeff_sq(q, sigma));
  return acc.value();
}

std::vector<double> signal_shell_energy(const ComponentSpec& spec, std::int64_t q_limit) {
  spec.validate();
  if (q_limit <= 1) return std::vector<double>(static_cast<std::size_t>(std::max<std::int64_t>(q_limit, 0)), 0.0);
  const int n = static_cast<int>(std::floor(std::sqrt(static_cast<double>(q_limit - 1))));
  return radial_aggregate(energy_factors(spec, n), q_limit);
}

SparsityPattern::SparsityPattern(int d, int s) : d_(d), s_(s), by_order_(static_cast<std::size_t>(s)) {
  if (d < 1 || s < 1 || s > d) throw DomainError("pattern needs 1 <= s <= d");
}

void SparsityPattern::add(ComponentSpec component) {
  component.validate();
  const int k = component.subset.k();
  if (k > s_) throw DomainError("component order " + std::to_string(k) + " exceeds s = " + std::to_string(s_));
  if (component.subset.indices().back() > d_) throw DomainError("component subset outside {1..d}");
  if (find(component.subset)) throw DomainError("duplicate active subset " + component.subset.to_string());
  by_order_[static_cast<std::size_t>(k - 1)].push_back(std::move(component));
}

const std::vector<ComponentSpec>& SparsityPattern::actives(int k) const {
  if (k < 1 || k > s_) throw DomainError("order outside [1, s]");
  return by_order_[static_cast<std::size_t>(k - 1)];
}

const ComponentSpec* SparsityPattern::find(const Subset& u) const {
  if (u.k() < 1 || u.k() > s_) return nullptr;
  for (const auto& c : by_order_[static_cast<std::size_t>(u.k() - 1)])
    if (c.subset == u) return &c;
  return nullptr;
}

std::size_t SparsityPattern::total_active() const {
  std::size_t n = 0;
  for (const auto& v : by_order_) n += v.size();
  return n;
}

SparsityPattern SparsityPattern::attenuated(const Subset& u, double alpha) const {
  if (!(alpha > 0.0)) throw DomainError("attenuation factor must be positive");
  SparsityPattern out = *this;
  if (u.k() < 1 || u.k() > s_) throw DomainError("attenuated subset has an order outside [1, s]");
  for (auto& c : out.by_order_[static_cast<std::size_t>(u.k() - 1)])
    if (c.subset == u) {
      c.amplitude *= alpha;
      return out;
    }
  throw DomainError("attenuated subset " + u.to_string() + " is not active");
}

namespace {

ComponentSpec product_of(std::vector<int> idx, int d) {
  Subset u(idx, d);
  return {std::move(u), std::move(idx), 1.0};
}

}  // namespace

SparsityPattern build_pattern(const DimensionSpec& spec) {
  spec.validate();
  const bool supported = (spec.d == 50 || spec.d == 100 || spec.d == 200) && spec.s == 4 &&
                         std::abs(spec.beta - 0.87) < 1e-12;
  if (!supported)
    throw DomainError("the preset pattern exists only for d in {50,100,200}, s = 4, beta = 0.87; "
                      "use an explicit component list");
  const int d = spec.d;
  SparsityPattern p(d, 4);
  for (int i = 1; i <= 2; ++i) p.add(product_of({i}, d));
  for (int i = 1; i <= 3; ++i) p.add(product_of({i, i + 1}, d));
  const int n3 = static_cast<int>(active_count(d, 3, spec.beta));
  for (int i = 1; i <= n3; ++i) p.add(product_of({1, 2, i + 2}, d));
  for (int i = 1; i <= 5; ++i) p.add(product_of({1, 2, 3, i + 3}, d));
  if (d >= 100)
    for (int i = 6; i <= 7; ++i) p.add(product_of({1, 2, 4, i + 2}, d));
  if (d >= 200)
    for (int i = 8; i <= 10; ++i) p.add(product_of({1, 2, 5, i - 1}, d));
  // Three pairs at every d, as listed. The rounding rule gives 4 at d = 200
  // (19900^0.13 = 3.62), so the pair count is not taken from active_count.
  return p;
}

SparsityPattern build_pattern(const DimensionSpec& spec, const std::vector<ComponentSpec>& components) {
  spec.validate();
  SparsityPattern p(spec.d, spec.s);
  for (const auto& c : components) p.add(c);
  return p;
}

}  // namespace exactsel
