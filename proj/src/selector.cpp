#include "exactsel/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "exactsel/errors.hpp"
#include "exactsel/kernels.hpp"
#include "kernels/reduction.hpp"

namespace exactsel {

double epsilon_hat(std::int64_t d, std::int64_t k, EpsHatRule rule, std::int64_t s) {
  if (rule == EpsHatRule::fixed) {
    const double lc = log_binomial(d, k);
    if (!(lc > 0.0)) throw DomainError("epsilon_hat needs log C(d,k) > 0");
    return 1.0 / std::sqrt(lc);
  }
  const double ld = std::log(static_cast<double>(d));
  const double lld = std::log(ld);
  if (!(ld > 0.0) || !(lld > 0.0)) throw DomainError("growing_s rule needs log log d > 0 (d >= 3)");
  if (s < 1) throw DomainError("growing_s rule needs s >= 1");
  return std::max(1.0 / std::sqrt(ld), std::log(static_cast<double>(s)) * lld / ld);
}

double threshold(std::int64_t d, std::int64_t k, int M, double eps_hat) {
  if (M < 1) throw DomainError("threshold needs M >= 1");
  return std::sqrt((2.0 + eps_hat) * (log_binomial(d, k) + std::log(static_cast<double>(M))));
}

int preset_truncation(int k) {
  static constexpr int kPreset[] = {622, 154, 65, 36};
  if (k < 1 || k > 4) throw DomainError("preset truncation exists only for k in [1, 4]");
  return kPreset[k - 1];
}

void SelectorConfig::validate() const {
  dim.validate();
  if (M < 0) throw DomainError("grid size M must be nonnegative");
  if (truncation == TruncationMode::preset && dim.s > 4)
    throw DomainError("preset truncation exists only for k in [1, 4]");
}

std::uint64_t subset_stream_seed(std::uint64_t seed, const Subset& u, int d) {
  if (binomial_u64(d, u.k())) return substream_seed(seed, {static_cast<std::uint64_t>(u.k()), subset_rank(u, d)});
  std::uint64_t h = static_cast<std::uint64_t>(u.k());
  for (int i : u.indices()) h = splitmix64(h ^ static_cast<std::uint64_t>(i));
  return substream_seed(seed, {0xffffULL, h});
}

// ---------------------------------------------------------------------------

Observation::Observation(Subset owner, double epsilon, int truncation_n, LatticeBall points,
                         std::vector<std::uint32_t> offsets, std::vector<std::int64_t> shell_q,
                         std::vector<double> values)
    : owner_(std::move(owner)), epsilon_(epsilon), truncation_n_(truncation_n), points_(std::move(points)),
      offsets_(std::move(offsets)), shell_q_(std::move(shell_q)), values_(std::move(values)) {
  if (values_.size() != points_.size() || offsets_.size() != shell_q_.size() + 1 ||
      offsets_.back() != values_.size())
    throw DomainError("observation layout is inconsistent");
}

std::optional<double> Observation::value(const FrequencyIndex& l) const {
  if (l.k() != points_.k()) return std::nullopt;
  const auto q = l.squared_norm();
  const auto it = std::lower_bound(shell_q_.begin(), shell_q_.end(), q);
  if (it == shell_q_.end() || *it != q) return std::nullopt;
  const auto j = static_cast<std::size_t>(it - shell_q_.begin());
  for (std::size_t i = offsets_[j]; i < offsets_[j + 1]; ++i) {
    const auto p = points_.point(i);
    if (std::equal(p.begin(), p.end(), l.coords().begin())) return values_[i];
  }
  return std::nullopt;
}

double statistic_S(const Observation& obs, const WeightProfile& w) {
  if (w.k() != obs.points().k()) throw DomainError("weight order differs from the observation order");
  const auto& sq = obs.shell_q();
  std::vector<double> Y(sq.size());
  kernels::active().shell_sums(obs.values().data(), obs.offsets().data(), sq.size(), 1.0 / obs.epsilon(),
                               Y.data());
  kernels::NeumaierSum acc;
  for (const auto& s : w.shells()) {
    const auto it = std::lower_bound(sq.begin(), sq.end(), s.q);
    const auto j = static_cast<std::size_t>(it - sq.begin());
    if (it == sq.end() || *it != s.q ||
        static_cast<double>(obs.offsets()[j + 1] - obs.offsets()[j]) != s.count)
      throw DomainError("weight shell |l|^2 = " + std::to_string(s.q) +
                        " is not fully observed; the truncation does not cover the weight support");
    acc.add(s.value * Y[j]);
  }
  return acc.value();
}

std::size_t SelectionResult::selected_count() const {
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [](const SubsetOutcome& o) { return o.selected; }));
}

// ---------------------------------------------------------------------------

namespace {

void build_basis(OrderSetup& o) {
  const WeightProfile* widest = nullptr;
  for (const auto& p : o.profiles)
    if (!widest || p.support_radius() > widest->support_radius()) widest = &p;
  ShellBasis& b = o.basis;
  if (!widest) return;
  for (const auto& s : widest->shells()) {
    b.q.push_back(s.q);
    b.count.push_back(s.count);
  }
  const std::size_t n = b.q.size();
  b.W.assign(o.profiles.size() * n, 0.0);
  for (std::size_t m = 0; m < o.profiles.size(); ++m) {
    std::size_t j = 0;
    for (const auto& s : o.profiles[m].shells()) {
      while (j < n && b.q[j] < s.q) ++j;
      if (j == n || b.q[j] != s.q) throw DomainError("weight supports are not nested");
      b.W[m * n + j] = s.value;
    }
  }
}

void build_points(OrderSetup& o) {
  const LatticeBall ball = lattice_ball(o.k, o.support_radius);
  const std::size_t n = ball.size();
  std::vector<std::int64_t> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t s = 0;
    for (auto c : ball.point(i)) s += static_cast<std::int64_t>(c) * c;
    q[i] = s;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return q[a] < q[b]; });
  std::vector<std::int32_t> coords;
  coords.reserve(n * static_cast<std::size_t>(o.k));
  for (std::size_t i : order)
    for (auto c : ball.point(i)) coords.push_back(c);
  o.points.emplace(o.k, o.support_radius, std::move(coords));

  o.offsets.assign(o.basis.shells() + 1, 0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t qi = q[order[i]];
    while (j < o.basis.shells() && o.basis.q[j] < qi) o.offsets[++j] = static_cast<std::uint32_t>(i);
    if (j == o.basis.shells() || o.basis.q[j] != qi) throw DomainError("lattice point outside the weight shells");
  }
  while (j < o.basis.shells()) o.offsets[++j] = static_cast<std::uint32_t>(n);
  for (std::size_t s = 0; s < o.basis.shells(); ++s)
    if (static_cast<double>(o.offsets[s + 1] - o.offsets[s]) != o.basis.count[s])
      throw DomainError("lattice enumeration disagrees with the shell counts");
}

}  // namespace

Selector::Selector(SelectorConfig config) : config_(std::move(config)) {
  config_.validate();
  const DimensionSpec& dim = config_.dim;
  const std::vector<double> betas =
      config_.M >= 2 ? beta_grid(config_.M) : (config_.M == 1 ? std::vector<double>{0.5} : std::vector<double>{});
  for (int k = 1; k <= dim.s; ++k) {
    OrderSetup o;
    o.k = k;
    o.log_binom = log_binomial(dim.d, k);
    o.eps_hat = epsilon_hat(dim.d, k, config_.eps_hat_rule, dim.s);
    o.threshold = config_.M >= 1 ? threshold(dim.d, k, config_.M, o.eps_hat)
                                 : std::numeric_limits<double>::infinity();
    o.betas = betas;
    for (double b : betas) {
      const double target = calibration_target(dim.d, k, b);
      const double r = solve_r_star(target, k, dim.sigma, dim.epsilon, config_.calibration);
      o.targets.push_back(target);
      o.r_stars.push_back(r);
      o.profiles.push_back(weights(r, k, dim.sigma, dim.epsilon));
      o.support_radius = std::max(o.support_radius, o.profiles.back().support_radius());
    }
    const int needed = o.profiles.empty() ? 0 : lattice_ball_max_abs(k, o.support_radius);
    o.truncation_n = config_.truncation == TruncationMode::preset
                         ? preset_truncation(k)
                         : static_cast<int>(std::ceil(o.support_radius));
    if (needed > o.truncation_n)
      throw DomainError("truncation n = " + std::to_string(o.truncation_n) + " at k = " + std::to_string(k) +
                        " misses weights up to |l_j| = " + std::to_string(needed));
    build_basis(o);
    double points = 0.0;
    for (double c : o.basis.count) points += c;
    o.coefficient_path = config_.noise == NoiseModel::coefficient ||
                         (config_.noise == NoiseModel::automatic &&
                          points <= static_cast<double>(config_.explicit_point_limit));
    if (o.coefficient_path && !o.profiles.empty()) build_points(o);
    orders_.push_back(std::move(o));
  }
}

const OrderSetup& Selector::order(int k) const {
  if (k < 1 || k > static_cast<int>(orders_.size())) throw DomainError("order outside [1, s]");
  return orders_[static_cast<std::size_t>(k - 1)];
}

GridSpec Selector::grid() const {
  GridSpec g;
  g.M = config_.M;
  if (!orders_.empty()) g.betas = orders_.front().betas;
  for (const auto& o : orders_) {
    g.r_stars.push_back(o.r_stars);
    g.eps_hat.push_back(o.eps_hat);
  }
  return g;
}

std::vector<double> Selector::shell_noncentrality(const Subset& u, const SparsityPattern& pattern) const {
  const OrderSetup& o = order(u.k());
  std::vector<double> lambda(o.basis.shells(), 0.0);
  const ComponentSpec* spec = pattern.find(u);
  if (!spec || lambda.empty()) return lambda;
  const std::vector<double> energy = signal_shell_energy(*spec, o.basis.q.back() + 1);
  const double inv_eps2 = 1.0 / (config_.dim.epsilon * config_.dim.epsilon);
  for (std::size_t j = 0; j < lambda.size(); ++j) lambda[j] = energy[static_cast<std::size_t>(o.basis.q[j])] * inv_eps2;
  return lambda;
}

Observation Selector::simulate_observation(const Subset& u, const SparsityPattern& pattern,
                                           std::uint64_t seed) const {
  const OrderSetup& o = order(u.k());
  OrderSetup local;
  const OrderSetup* layout = &o;
  if (!o.points) {
    // Shell-path order: materialize the support on demand.
    local.k = o.k;
    local.support_radius = o.support_radius;
    local.basis = o.basis;
    if (!o.profiles.empty()) build_points(local);
    else local.offsets.assign(1, 0);
    layout = &local;
  }
  const std::size_t n = layout->points ? layout->points->size() : 0;
  std::vector<double> values(n);
  Engine rng(subset_stream_seed(seed, u, config_.dim.d));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double eps = config_.dim.epsilon;
  for (std::size_t i = 0; i < n; ++i) values[i] = eps * normal(rng);
  if (const ComponentSpec* spec = pattern.find(u)) {
    const CoefficientBank& bank = CoefficientBank::shared();
    for (std::size_t i = 0; i < n; ++i) {
      double theta = 1.0;
      const auto p = layout->points->point(i);
      for (std::size_t c = 0; c < p.size(); ++c) theta *= bank.coeff(spec->factor_ids[c], p[c]);
      values[i] += spec->amplitude * theta;
    }
  }
  LatticeBall pts = layout->points ? *layout->points : LatticeBall(u.k(), 0.0, {});
  return Observation(u, eps, o.truncation_n, std::move(pts), layout->offsets, o.basis.q, std::move(values));
}

std::vector<double> Selector::shell_statistics(const Observation& obs) const {
  const OrderSetup& o = order(obs.owner().k());
  std::vector<double> Y(o.basis.shells());
  if (obs.shell_q() != o.basis.q) throw DomainError("observation shells differ from the selector basis");
  kernels::active().shell_sums(obs.values().data(), obs.offsets().data(), Y.size(), 1.0 / obs.epsilon(),
                               Y.data());
  return Y;
}

std::vector<double> Selector::shell_statistics(const Subset& u, const SparsityPattern& pattern,
                                               std::uint64_t seed) const {
  const OrderSetup& o = order(u.k());
  if (o.coefficient_path) return shell_statistics(simulate_observation(u, pattern, seed));
  const std::vector<double> lambda = shell_noncentrality(u, pattern);
  Engine rng(subset_stream_seed(seed, u, config_.dim.d));
  std::vector<double> Y(o.basis.shells());
  for (std::size_t j = 0; j < Y.size(); ++j)
    Y[j] = noncentral_chi_square(rng, o.basis.count[j], lambda[j]) - o.basis.count[j];
  return Y;
}

SubsetOutcome Selector::decide(const Subset& u, const std::vector<double>& Y) const {
  const OrderSetup& o = order(u.k());
  SubsetOutcome out;
  out.subset = u;
  const std::size_t M = o.profiles.size();
  if (M == 0) return out;
  if (Y.size() != o.basis.shells()) throw DomainError("shell statistics do not match the selector basis");
  out.S.assign(M, 0.0);
  kernels::active().gemv(o.basis.W.data(), M, Y.size(), Y.size(), Y.data(), out.S.data());
  out.argmax = static_cast<int>(std::max_element(out.S.begin(), out.S.end()) - out.S.begin());
  out.selected = out.S[static_cast<std::size_t>(out.argmax)] > o.threshold;
  return out;
}

SubsetOutcome Selector::evaluate(const Subset& u, const SparsityPattern& pattern, std::uint64_t seed) const {
  return decide(u, shell_statistics(u, pattern, seed));
}

SelectionResult Selector::select(const std::vector<Observation>& observations) const {
  SelectionResult r;
  r.outcomes.reserve(observations.size());
  for (const auto& obs : observations) r.outcomes.push_back(decide(obs.owner(), shell_statistics(obs)));
  return r;
}

// ---------------------------------------------------------------------------

TailAuditReport tail_bound_audit(double T, std::uint64_t trials, std::uint64_t seed, const WeightProfile& w,
                                 const std::vector<double>* signal_lambda) {
  if (trials == 0) throw DomainError("tail audit needs at least one trial");
  const auto& shells = w.shells();
  if (signal_lambda && signal_lambda->size() != shells.size())
    throw DomainError("signal noncentralities must align with the weight shells");
  TailAuditReport rep;
  rep.T = T;
  rep.trials = trials;
  rep.reference = std::exp(-0.5 * T * T);
  rep.regime_ok = T * w.max_weight() <= 0.1;

  std::uint64_t upper = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Engine rng = substream(seed, {0x6e756c6cULL, t});
    kernels::NeumaierSum s;
    for (const auto& sh : shells) s.add(sh.value * (noncentral_chi_square(rng, sh.count, 0.0) - sh.count));
    if (s.value() > T) ++upper;
  }
  rep.upper_exceedance = static_cast<double>(upper) / static_cast<double>(trials);

  if (signal_lambda) {
    kernels::NeumaierSum mean;
    for (std::size_t j = 0; j < shells.size(); ++j) mean.add(shells[j].value * (*signal_lambda)[j]);
    rep.signal_mean = mean.value();
    std::uint64_t lower = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      Engine rng = substream(seed, {0x7369676eULL, t});
      kernels::NeumaierSum s;
      for (std::size_t j = 0; j < shells.size(); ++j)
        s.add(shells[j].value *
              (noncentral_chi_square(rng, shells[j].count, (*signal_lambda)[j]) - shells[j].count));
      if (s.value() - *rep.signal_mean < -T) ++lower;
    }
    rep.lower_exceedance = static_cast<double>(lower) / static_cast<double>(trials);
  }
  return rep;
}

}  // namespace exactsel
