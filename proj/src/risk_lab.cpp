#include "exactsel/risk_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "exactsel/errors.hpp"
#include "exactsel/extremal.hpp"
#include "exactsel/random.hpp"

namespace exactsel {

namespace {

constexpr std::uint64_t kCycleTag = 0x6379636cULL;
constexpr std::uint64_t kPoolTag = 0x706f6f6cULL;

std::uint64_t cycle_seed(std::uint64_t seed, int cycle) {
  return substream_seed(seed, {kCycleTag, static_cast<std::uint64_t>(cycle)});
}

// Runs fn(c) for c in [0, n); results must be written to per-c slots.
template <class Fn>
void parallel_cycles(int n, int threads, Fn&& fn) {
  int workers = threads == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : threads;
  workers = std::clamp(workers, 1, std::max(n, 1));
  if (workers == 1) {
    for (int c = 0; c < n; ++c) fn(c);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int c = next++; c < n && !failed; c = next++) {
        try {
          fn(c);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct CycleTally {
  std::int64_t loss = 0;
  std::vector<std::uint64_t> fp, miss;  // per order
};

RiskReport make_report(const SparsityPattern& pattern, const RiskOptions& opt, double alpha,
                       const std::vector<std::vector<Subset>>& subsets, const std::vector<CycleTally>& cycles) {
  RiskReport rep;
  rep.J = opt.J;
  rep.alpha = alpha;
  rep.mode = opt.enumeration.mode;
  rep.pool_size = opt.enumeration.mode == EnumerationMode::pool ? opt.enumeration.pool_size : 0;
  rep.seed = opt.seed;
  for (int k = 1; k <= pattern.s(); ++k) {
    OrderTally t;
    t.k = k;
    t.universe = binomial_u64(pattern.d(), k).value_or(0);
    t.active = pattern.actives(k).size();
    const auto& evaluated = subsets[static_cast<std::size_t>(k - 1)];
    t.inactive_evaluated = evaluated.size() - t.active;
    rep.orders.push_back(t);
  }
  double total = 0.0;
  for (const auto& c : cycles) {
    rep.per_cycle_losses.push_back(c.loss);
    total += static_cast<double>(c.loss);
    for (std::size_t k = 0; k < rep.orders.size(); ++k) {
      rep.orders[k].false_positives += c.fp[k];
      rep.orders[k].misses += c.miss[k];
    }
  }
  rep.err = total / static_cast<double>(cycles.size());
  return rep;
}

void tally(CycleTally& t, int k, bool selected, bool active) {
  if (selected == active) return;
  ++t.loss;
  if (selected)
    ++t.fp[static_cast<std::size_t>(k - 1)];
  else
    ++t.miss[static_cast<std::size_t>(k - 1)];
}

}  // namespace

std::int64_t hamming_loss(const SelectionResult& estimate, const SparsityPattern& truth) {
  std::int64_t loss = 0;
  for (const auto& o : estimate.outcomes) {
    const int k = o.subset.k();
    if (k < 1 || k > truth.s() || o.subset.indices().back() > truth.d())
      throw DomainError("subset " + o.subset.to_string() + " lies outside the pattern's universe");
    loss += (o.selected != truth.is_active(o.subset)) ? 1 : 0;
  }
  return loss;
}

double RiskReport::standard_error() const {
  if (per_cycle_losses.size() < 2) return 0.0;
  double ss = 0.0;
  for (auto l : per_cycle_losses) ss += (static_cast<double>(l) - err) * (static_cast<double>(l) - err);
  const double n = static_cast<double>(per_cycle_losses.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

double RiskReport::extrapolated_false_positives() const {
  double total = 0.0;
  for (const auto& t : orders) {
    if (t.inactive_evaluated == 0 || J == 0) continue;
    const double rate = static_cast<double>(t.false_positives) /
                        (static_cast<double>(J) * static_cast<double>(t.inactive_evaluated));
    total += rate * static_cast<double>(t.universe - t.active);
  }
  return total;
}

std::vector<Subset> evaluation_subsets(const SparsityPattern& pattern, int k, const EnumerationSpec& e,
                                       std::uint64_t seed) {
  const int d = pattern.d();
  const auto universe = binomial_u64(d, k);
  if (!universe) throw CapacityError("C(d,k) does not fit in 64 bits");
  std::vector<std::uint64_t> active;
  for (const auto& c : pattern.actives(k)) active.push_back(subset_rank(c.subset, d));
  std::sort(active.begin(), active.end());
  const std::uint64_t inactive_total = *universe - active.size();

  std::vector<std::uint64_t> ranks;
  if (e.mode == EnumerationMode::full || e.pool_size >= inactive_total) {
    std::vector<Subset> all;
    all.reserve(static_cast<std::size_t>(*universe));
    SubsetStream stream(d, k, FullEnumeration{});
    while (auto u = stream.next()) all.push_back(std::move(*u));
    return all;
  }
  const auto sample =
      sample_ranks(inactive_total, e.pool_size, substream_seed(seed, {kPoolTag, static_cast<std::uint64_t>(k)}));
  // The x-th inactive rank: skip the active ranks not above it.
  std::size_t j = 0;
  for (std::uint64_t x : sample) {
    std::uint64_t y = x + j;
    while (j < active.size() && active[j] <= y) y = x + ++j;
    ranks.push_back(y);
  }
  ranks.insert(ranks.end(), active.begin(), active.end());
  std::sort(ranks.begin(), ranks.end());
  std::vector<Subset> out;
  out.reserve(ranks.size());
  for (auto r : ranks) out.push_back(subset_unrank(r, d, k));
  return out;
}

RiskReport estimate_risk(const SparsityPattern& pattern, const Selector& selector, const RiskOptions& opt) {
  if (opt.J < 1) throw DomainError("risk estimation needs J >= 1");
  if (selector.config().dim.d != pattern.d() || selector.config().dim.s != pattern.s())
    throw DomainError("selector and pattern disagree on (d, s)");
  std::vector<std::vector<Subset>> subsets;
  for (int k = 1; k <= pattern.s(); ++k) subsets.push_back(evaluation_subsets(pattern, k, opt.enumeration, opt.seed));

  std::vector<CycleTally> cycles(static_cast<std::size_t>(opt.J));
  parallel_cycles(opt.J, opt.threads, [&](int c) {
    CycleTally t;
    t.fp.assign(static_cast<std::size_t>(pattern.s()), 0);
    t.miss.assign(static_cast<std::size_t>(pattern.s()), 0);
    const std::uint64_t s = cycle_seed(opt.seed, c);
    for (const auto& list : subsets)
      for (const auto& u : list) tally(t, u.k(), selector.evaluate(u, pattern, s).selected, pattern.is_active(u));
    cycles[static_cast<std::size_t>(c)] = std::move(t);
  });
  return make_report(pattern, opt, 1.0, subsets, cycles);
}

std::vector<RiskReport> attenuation_experiment(const std::vector<double>& alphas, const SparsityPattern& pattern,
                                               const Selector& selector, const RiskOptions& opt,
                                               const Subset& target) {
  if (opt.J < 1) throw DomainError("risk estimation needs J >= 1");
  for (double a : alphas)
    if (!(a > 0.0 && a <= 1.0)) throw DomainError("attenuation factors must lie in (0, 1]");
  if (!pattern.is_active(target)) throw DomainError("attenuated subset " + target.to_string() + " is not active");
  std::vector<SparsityPattern> patterns;
  for (double a : alphas) patterns.push_back(pattern.attenuated(target, a));

  std::vector<std::vector<Subset>> subsets;
  for (int k = 1; k <= pattern.s(); ++k) subsets.push_back(evaluation_subsets(pattern, k, opt.enumeration, opt.seed));

  // Every subset but the target sees the same signal and noise for all alphas,
  // so its contribution is computed once per cycle.
  std::vector<std::vector<CycleTally>> per_alpha(alphas.size(), std::vector<CycleTally>(static_cast<std::size_t>(opt.J)));
  parallel_cycles(opt.J, opt.threads, [&](int c) {
    CycleTally base;
    base.fp.assign(static_cast<std::size_t>(pattern.s()), 0);
    base.miss.assign(static_cast<std::size_t>(pattern.s()), 0);
    const std::uint64_t s = cycle_seed(opt.seed, c);
    for (const auto& list : subsets)
      for (const auto& u : list) {
        if (u == target) continue;
        tally(base, u.k(), selector.evaluate(u, pattern, s).selected, pattern.is_active(u));
      }
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      CycleTally t = base;
      tally(t, target.k(), selector.evaluate(target, patterns[a], s).selected, true);
      per_alpha[a][static_cast<std::size_t>(c)] = std::move(t);
    }
  });
  std::vector<RiskReport> out;
  for (std::size_t a = 0; a < alphas.size(); ++a)
    out.push_back(make_report(pattern, opt, alphas[a], subsets, per_alpha[a]));
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::selectable:
      return "selectable";
    case Verdict::detectable_only:
      return "detectable_only";
    case Verdict::undetectable:
      return "undetectable";
    default:
      return "boundary";
  }
}

double selection_boundary(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  return std::numbers::sqrt2 * (1.0 + std::sqrt(1.0 - beta));
}

double detection_boundary() { return std::numbers::sqrt2; }

RegimeVerdict classify_ratio(double ratio, double beta, double band) {
  RegimeVerdict v;
  v.ratio = ratio;
  v.selection_threshold = selection_boundary(beta);
  v.detection_threshold = detection_boundary();
  if (ratio > v.selection_threshold + band)
    v.verdict = Verdict::selectable;
  else if (ratio > v.detection_threshold + band && ratio < v.selection_threshold - band)
    v.verdict = Verdict::detectable_only;
  else if (ratio < v.detection_threshold - band)
    v.verdict = Verdict::undetectable;
  else
    v.verdict = Verdict::boundary;
  return v;
}

RegimeVerdict classify_regime(const std::vector<double>& r_family, const DimensionSpec& spec, double band) {
  spec.validate();
  if (static_cast<int>(r_family.size()) != spec.s) throw DomainError("need one radius per order k = 1..s");
  double ratio = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= spec.s; ++k) {
    const double a = a_exact(r_family[static_cast<std::size_t>(k - 1)], k, spec.sigma, spec.epsilon);
    ratio = std::min(ratio, a / std::sqrt(log_binomial(spec.d, k)));
  }
  return classify_ratio(ratio, spec.beta, band);
}

std::vector<BoundaryRow> boundary_sweep(const BoundaryGrid& grid) {
  if (grid.r_points < 1 || !(grid.ratio_lo > 0.0) || grid.ratio_lo > grid.ratio_hi)
    throw DomainError("boundary sweep needs 0 < ratio_lo <= ratio_hi and r_points >= 1");
  std::vector<BoundaryRow> rows;
  for (double sigma : grid.sigmas)
    for (int d : grid.ds)
      for (int k : grid.ks) {
        const double r_max = admissible_radius_bound(k, sigma) * (1.0 - 1e-9);
        const double lc = std::sqrt(log_binomial(d, k));
        for (int i = 0; i < grid.r_points; ++i) {
          const double target =
              grid.r_points == 1
                  ? grid.ratio_lo
                  : grid.ratio_lo * std::pow(grid.ratio_hi / grid.ratio_lo, static_cast<double>(i) / (grid.r_points - 1));
          const double r = std::min(
              r_max, solve_r_star(target * lc, k, sigma, grid.epsilon, CalibrationMode::asymptotic));
          const double ratio = a_exact(r, k, sigma, grid.epsilon) / lc;
          for (double beta : grid.betas) {
            const RegimeVerdict v = classify_ratio(ratio, beta, grid.band);
            rows.push_back({beta, sigma, d, k, r, ratio, v.verdict});
          }
        }
      }
  return rows;
}

}  // namespace exactsel
