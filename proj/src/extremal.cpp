#include "exactsel/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "exactsel/errors.hpp"
#include "kernels/reduction.hpp"

namespace exactsel {

namespace {

constexpr double kPi = std::numbers::pi;

// Nonzero shells of Z̊^k with q < q_limit, cached per k.
std::shared_ptr<const std::vector<RadialShell>> nonzero_shells(int k, std::int64_t q_limit) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const std::vector<RadialShell>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[k];
  if (slot && !slot->empty() && slot->back().q + 1 >= q_limit) {
    // Covered if the dense table behind it reached q_limit; recorded as a sentinel below.
    return slot;
  }
  auto dense = shell_counts(k, q_limit);
  auto sparse = std::make_shared<std::vector<RadialShell>>();
  for (std::size_t q = 0; q < dense->size(); ++q)
    if ((*dense)[q] > 0.0) sparse->push_back({static_cast<std::int64_t>(q), (*dense)[q], 0.0});
  // Sentinel marks the covered length; it carries no points.
  sparse->push_back({static_cast<std::int64_t>(dense->size()) - 1, 0.0, 0.0});
  slot = std::move(sparse);
  return slot;
}

double log_theta_constant(double r, int k, double sigma) {
  const double kk = k;
  return (2.0 + kk / sigma) * std::log(r) + kk * std::log(2.0) + 0.5 * kk * std::log(kPi) +
         std::log(kk + 2.0 * sigma) + std::lgamma(1.0 + 0.5 * kk) - std::log(2.0 * sigma) -
         kk / (2.0 * sigma) * std::log1p(4.0 * sigma / kk);
}

const RadialShell* find_shell(const std::vector<RadialShell>& shells, std::int64_t q) {
  auto it = std::lower_bound(shells.begin(), shells.end(), q,
                             [](const RadialShell& s, std::int64_t v) { return s.q < v; });
  return (it != shells.end() && it->q == q) ? &*it : nullptr;
}

std::size_t count_points(const std::vector<RadialShell>& shells) {
  double n = 0.0;
  for (const auto& s : shells) n += s.count;
  return static_cast<std::size_t>(n);
}

}  // namespace

double admissible_radius_bound(int k, double sigma) {
  return std::pow(2.0 * kPi, -sigma) * std::pow(static_cast<double>(k), -0.5 * sigma);
}

double sobolev_coeff_sq(std::int64_t q, double sigma) {
  return std::pow(4.0 * kPi * kPi * static_cast<double>(q), sigma);
}

double sobolev_coeff(const FrequencyIndex& l, double sigma) {
  if (l.k() == 0) throw DomainError("sobolev_coeff needs a nonempty frequency index");
  return std::sqrt(sobolev_coeff_sq(l.squared_norm(), sigma));
}

double extremal_support_radius(double r, int k, double sigma) {
  return std::pow(1.0 + 4.0 * sigma / k, 1.0 / (2.0 * sigma)) / (2.0 * kPi * std::pow(r, 1.0 / sigma));
}

ExtremalProfile::ExtremalProfile(double r, int k, double sigma, std::vector<RadialShell> shells)
    : r_(r), k_(k), sigma_(sigma), support_radius_(extremal_support_radius(r, k, sigma)),
      shells_(std::move(shells)) {}

double ExtremalProfile::theta_sq_at(std::int64_t q) const {
  const RadialShell* s = find_shell(shells_, q);
  return s ? s->value : 0.0;
}

double ExtremalProfile::theta_sq(const FrequencyIndex& l) const {
  if (l.k() != k_) throw DomainError("frequency index arity differs from the profile order");
  return theta_sq_at(l.squared_norm());
}

std::size_t ExtremalProfile::support_size() const { return count_points(shells_); }

LatticeBall ExtremalProfile::support(std::size_t point_budget) const {
  return lattice_ball(k_, support_radius_, point_budget);
}

double ExtremalProfile::sum_theta4() const {
  kernels::NeumaierSum acc;
  for (const auto& s : shells_) acc.add(s.count * s.value * s.value);
  return acc.value();
}

ExtremalProfile extremal_sequence(double r, int k, double sigma, std::size_t shell_budget) {
  if (k < 1) throw DomainError("extremal_sequence requires k >= 1");
  if (!(sigma > 0.0)) throw DomainError("extremal_sequence requires sigma > 0");
  const double bound = admissible_radius_bound(k, sigma);
  if (!(r > 0.0 && r < bound)) {
    std::ostringstream os;
    os << "radius r = " << r << " outside the admissible interval (0, " << bound
       << ") = (0, (2π)^-σ k^-σ/2); the constraint set is empty";
    throw DomainError(os.str());
  }
  const double R = extremal_support_radius(r, k, sigma);
  const double q_bound = R * R;
  if (q_bound > static_cast<double>(shell_budget))
    throw CapacityError("extremal support radius " + std::to_string(R) + " needs " +
                        std::to_string(static_cast<long long>(q_bound)) +
                        " shells, above the budget of " + std::to_string(shell_budget));
  const auto q_limit = static_cast<std::int64_t>(std::ceil(q_bound)) + 1;
  auto table = nonzero_shells(k, q_limit);

  const double constant = std::exp(log_theta_constant(r, k, sigma));
  const double scale = r * r / (1.0 + 4.0 * sigma / k);
  std::vector<RadialShell> shells;
  for (const auto& s : *table) {
    if (s.count == 0.0) continue;
    if (static_cast<double>(s.q) >= q_bound) break;
    const double factor = 1.0 - sobolev_coeff_sq(s.q, sigma) * scale;
    if (factor <= 0.0) continue;
    shells.push_back({s.q, s.count, constant * factor});
  }
  return ExtremalProfile(r, k, sigma, std::move(shells));
}

double a_exact(double r, int k, double sigma, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("a_exact requires epsilon > 0");
  const ExtremalProfile profile = extremal_sequence(r, k, sigma);
  return std::sqrt(0.5 * profile.sum_theta4()) / (epsilon * epsilon);
}

double asymptotic_constant(int k, double sigma, Regime regime) {
  const double kk = k;
  if (regime == Regime::fixed_k) {
    const double log_c2 = kk * std::log(kPi) + std::log1p(2.0 * sigma / kk) + std::lgamma(1.0 + 0.5 * kk) -
                          (1.0 + kk / (2.0 * sigma)) * std::log1p(4.0 * sigma / kk) -
                          kk * std::lgamma(1.5);
    return std::exp(0.5 * log_c2);
  }
  const double log_c = 0.25 * kk * (std::log(2.0 * kPi * kk) - 1.0) - 1.0 + 0.25 * std::log(kPi * kk);
  return std::exp(log_c);
}

double a_asymp(double r, int k, double sigma, double epsilon, Regime regime) {
  if (r <= 0.0) return 0.0;
  const double p = 2.0 + k / (2.0 * sigma);
  return asymptotic_constant(k, sigma, regime) * std::pow(r, p) / (epsilon * epsilon);
}

double solve_r_star(double target_a, int k, double sigma, double epsilon, CalibrationMode mode,
                    Regime regime) {
  if (!(target_a > 0.0)) throw DomainError("solve_r_star requires a positive target");
  const double p = 2.0 + k / (2.0 * sigma);
  const double closed_form =
      std::pow(target_a * epsilon * epsilon / asymptotic_constant(k, sigma, regime), 1.0 / p);
  if (mode == CalibrationMode::asymptotic) return closed_form;

  const double r_max = admissible_radius_bound(k, sigma) * (1.0 - 1e-12);
  const double a_max = a_exact(r_max, k, sigma, epsilon);
  if (target_a > a_max) {
    std::ostringstream os;
    os << "target a = " << target_a << " unreachable: a at the right end of the admissible interval is "
       << a_max;
    throw RangeError(os.str());
  }
  auto residual = [&](double r) { return a_exact(r, k, sigma, epsilon) - target_a; };

  constexpr double kStep = 1.05;
  double lo = std::min(closed_form, r_max);
  double hi = lo;
  if (residual(lo) < 0.0) {
    do {
      lo = hi;
      hi = std::min(hi * kStep, r_max);
    } while (residual(hi) < 0.0);
  } else {
    do {
      hi = lo;
      lo /= kStep;
    } while (residual(lo) >= 0.0);
  }
  double best = hi;
  double best_err = std::abs(residual(hi));
  for (int it = 0; it < 200 && best_err > 1e-13 * target_a; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = residual(mid);
    if (std::abs(f) < best_err) {
      best = mid;
      best_err = std::abs(f);
    }
    (f < 0.0 ? lo : hi) = mid;
  }
  return best;
}

double calibration_target(std::int64_t d, std::int64_t k, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("calibration_target requires beta in (0, 1)");
  return (1.0 + std::sqrt(1.0 - beta)) * std::sqrt(2.0 * log_binomial(d, k));
}

std::vector<double> beta_grid(int M) {
  if (M < 2) throw DomainError("beta_grid requires M >= 2");
  std::vector<double> betas(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) betas[static_cast<std::size_t>(m)] = 0.001 + m * (0.998 / (M - 1));
  betas.back() = 0.999;
  return betas;
}

WeightProfile::WeightProfile(double source_r, double a_value, int k, double sigma, double epsilon,
                             double support_radius, std::vector<RadialShell> shells)
    : source_r_(source_r), a_value_(a_value), k_(k), sigma_(sigma), epsilon_(epsilon),
      support_radius_(support_radius), shells_(std::move(shells)) {}

double WeightProfile::omega_at(std::int64_t q) const {
  const RadialShell* s = find_shell(shells_, q);
  return s ? s->value : 0.0;
}

double WeightProfile::omega(const FrequencyIndex& l) const {
  if (l.k() != k_) throw DomainError("frequency index arity differs from the weight order");
  return omega_at(l.squared_norm());
}

double WeightProfile::sum_sq() const {
  kernels::NeumaierSum acc;
  for (const auto& s : shells_) acc.add(s.count * s.value * s.value);
  return acc.value();
}

double WeightProfile::max_weight() const {
  double m = 0.0;
  for (const auto& s : shells_) m = std::max(m, s.value);
  return m;
}

std::size_t WeightProfile::support_size() const { return count_points(shells_); }

WeightProfile weights(double r_star, int k, double sigma, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("weights require epsilon > 0");
  const ExtremalProfile profile = extremal_sequence(r_star, k, sigma);
  const double a = std::sqrt(0.5 * profile.sum_theta4()) / (epsilon * epsilon);
  const double denom = 2.0 * epsilon * epsilon * a;
  std::vector<RadialShell> shells = profile.shells();
  for (auto& s : shells) s.value /= denom;
  return WeightProfile(r_star, a, k, sigma, epsilon, profile.support_radius(), std::move(shells));
}

}  // namespace exactsel
