#include "exactsel/index_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "exactsel/errors.hpp"
#include "exactsel/random.hpp"

namespace exactsel {

Subset::Subset(std::vector<int> indices, int d) : indices_(std::move(indices)) {
  if (indices_.empty()) throw DomainError("subset must contain at least one index");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 1 || indices_[i] > d)
      throw DomainError("subset index " + std::to_string(indices_[i]) + " outside [1, " +
                        std::to_string(d) + "]");
    if (i > 0 && indices_[i] <= indices_[i - 1])
      throw DomainError("subset indices must be strictly increasing");
  }
}

std::string Subset::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < indices_.size(); ++i) os << (i ? "," : "") << indices_[i];
  os << '}';
  return os.str();
}

FrequencyIndex::FrequencyIndex(std::vector<int> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw DomainError("frequency index needs at least one coordinate");
  for (int c : coords_)
    if (c == 0) throw DomainError("frequency index coordinates must be nonzero");
}

std::int64_t FrequencyIndex::squared_norm() const {
  std::int64_t q = 0;
  for (int c : coords_) q += static_cast<std::int64_t>(c) * c;
  return q;
}

int FrequencyIndex::max_abs() const {
  int m = 0;
  for (int c : coords_) m = std::max(m, std::abs(c));
  return m;
}

void DimensionSpec::validate() const {
  if (d < 1) throw DomainError("d must be a positive integer");
  if (s < 1 || s > d) throw DomainError("s must lie in [1, d]");
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
}

double log_binomial(std::int64_t d, std::int64_t k) {
  if (d < 0 || k < 0 || k > d)
    throw DomainError("log_binomial: k = " + std::to_string(k) + " outside [0, " + std::to_string(d) +
                      "]");
  const std::int64_t j = std::min(k, d - k);
  if (j == 0) return 0.0;
  if (j <= 64) {
    // Short products are more accurate than differences of large lgamma values.
    double acc = 0.0;
    for (std::int64_t i = 1; i <= j; ++i)
      acc += std::log(static_cast<double>(d - j + i) / static_cast<double>(i));
    return acc;
  }
  return std::lgamma(static_cast<double>(d) + 1.0) - std::lgamma(static_cast<double>(j) + 1.0) -
         std::lgamma(static_cast<double>(d - j) + 1.0);
}

std::optional<std::uint64_t> binomial_u64(std::int64_t d, std::int64_t k) {
  if (d < 0 || k < 0 || k > d) return std::nullopt;
  const std::int64_t j = std::min(k, d - k);
  unsigned __int128 acc = 1;
  for (std::int64_t i = 1; i <= j; ++i) {
    acc = acc * static_cast<unsigned __int128>(d - j + i) / static_cast<unsigned __int128>(i);
    if (acc > static_cast<unsigned __int128>(INT64_MAX)) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

std::int64_t active_count(std::int64_t d, std::int64_t k, double beta) {
  if (d < 1 || k < 1 || k > d) throw DomainError("active_count requires 1 <= k <= d");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("active_count requires beta in (0, 1]");
  const double n = std::exp((1.0 - beta) * log_binomial(d, k));
  return std::max<std::int64_t>(1, std::llround(n));
}

LatticeBall::LatticeBall(int k, double radius, std::vector<std::int32_t> coords)
    : k_(k), radius_(radius), coords_(std::move(coords)) {
  if (k_ < 1) throw DomainError("lattice dimension must be positive");
  if (coords_.size() % static_cast<std::size_t>(k_) != 0)
    throw DomainError("flat coordinate buffer is not a multiple of k");
}

FrequencyIndex LatticeBall::index(std::size_t i) const {
  auto p = point(i);
  return FrequencyIndex(std::vector<int>(p.begin(), p.end()));
}

double lattice_ball_volume_bound(int k, double radius) {
  const double kk = k;
  return std::exp(0.5 * kk * std::log(std::numbers::pi) + kk * std::log(radius) -
                  std::lgamma(0.5 * kk + 1.0));
}

namespace {

void enumerate_ball(int k, int depth, std::int64_t partial, double r2, std::vector<std::int32_t>& prefix,
                    std::vector<std::int32_t>& out) {
  const std::int64_t rest = k - depth - 1;  // every later coordinate contributes at least 1
  const auto lmax = static_cast<std::int32_t>(std::floor(std::sqrt(std::max(0.0, r2))));
  for (std::int32_t l = -lmax; l <= lmax; ++l) {
    if (l == 0) continue;
    const std::int64_t q = partial + static_cast<std::int64_t>(l) * l;
    if (!(static_cast<double>(q + rest) < r2)) continue;
    prefix[static_cast<std::size_t>(depth)] = l;
    if (depth + 1 == k)
      out.insert(out.end(), prefix.begin(), prefix.end());
    else
      enumerate_ball(k, depth + 1, q, r2, prefix, out);
  }
}

}  // namespace

LatticeBall lattice_ball(int k, double radius, std::size_t point_budget) {
  if (k < 1) throw DomainError("lattice_ball requires k >= 1");
  if (!(radius > 0.0)) throw DomainError("lattice_ball requires R > 0");
  const double predicted = lattice_ball_volume_bound(k, radius);
  if (predicted > static_cast<double>(point_budget))
    throw CapacityError("lattice_ball(k=" + std::to_string(k) + ", R=" + std::to_string(radius) +
                        ") predicts ~" + std::to_string(static_cast<long long>(predicted)) +
                        " points, above the point budget of " + std::to_string(point_budget));
  std::vector<std::int32_t> coords;
  coords.reserve(static_cast<std::size_t>(predicted + 1.0) * static_cast<std::size_t>(k));
  std::vector<std::int32_t> prefix(static_cast<std::size_t>(k));
  enumerate_ball(k, 0, 0, radius * radius, prefix, coords);
  return LatticeBall(k, radius, std::move(coords));
}

int lattice_ball_max_abs(int k, double radius) {
  const double r2 = radius * radius;
  const double room = r2 - static_cast<double>(k - 1);
  if (room <= 1.0) return 0;
  auto l = static_cast<std::int64_t>(std::floor(std::sqrt(room)));
  while (l > 0 && !(static_cast<double>(l * l + (k - 1)) < r2)) --l;
  while (static_cast<double>((l + 1) * (l + 1) + (k - 1)) < r2) ++l;
  return static_cast<int>(l);
}

std::vector<double> radial_aggregate(std::span<const FoldedFactor> factors, std::int64_t q_limit) {
  const auto Q = static_cast<std::size_t>(std::max<std::int64_t>(q_limit, 0));
  std::vector<double> acc(Q, 0.0);
  if (Q == 0) return acc;
  if (factors.empty()) {
    acc[0] = 1.0;
    return acc;
  }
  auto place = [&](const FoldedFactor& f, std::vector<double>& out) {
    for (std::size_t l = 1; l < f.size() && l * l < Q; ++l) out[l * l] = f[l];
  };
  place(factors.front(), acc);
  std::vector<double> next(Q);
  for (std::size_t p = 1; p < factors.size(); ++p) {
    const FoldedFactor& f = factors[p];
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t q0 = 0; q0 < Q; ++q0) {
      const double a = acc[q0];
      if (a == 0.0) continue;
      for (std::size_t l = 1; l < f.size(); ++l) {
        const std::size_t q = q0 + l * l;
        if (q >= Q) break;
        next[q] += a * f[l];
      }
    }
    acc.swap(next);
  }
  return acc;
}

std::shared_ptr<const std::vector<double>> shell_counts(int k, std::int64_t q_limit) {
  if (k < 1) throw DomainError("shell_counts requires k >= 1");
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const std::vector<double>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[k];
  if (slot && static_cast<std::int64_t>(slot->size()) >= q_limit) return slot;
  const std::int64_t grown = std::max<std::int64_t>(
      {q_limit, slot ? 2 * static_cast<std::int64_t>(slot->size()) : 0, 64});
  const auto lmax = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(grown)))) + 1;
  std::vector<FoldedFactor> factors(static_cast<std::size_t>(k), FoldedFactor(lmax + 1, 2.0));
  slot = std::make_shared<const std::vector<double>>(radial_aggregate(factors, grown));
  return slot;
}

std::uint64_t subset_rank(const Subset& u, int d) {
  const int k = u.k();
  if (!binomial_u64(d, k)) throw DomainError("C(d,k) too large to rank subsets");
  std::uint64_t rank = 0;
  int prev = 0;
  for (int i = 0; i < k; ++i) {
    const int a = u.indices()[static_cast<std::size_t>(i)];
    for (int v = prev + 1; v < a; ++v) rank += *binomial_u64(d - v, k - i - 1);
    prev = a;
  }
  return rank;
}

Subset subset_unrank(std::uint64_t rank, int d, int k) {
  const auto total = binomial_u64(d, k);
  if (!total) throw DomainError("C(d,k) too large to unrank subsets");
  if (rank >= *total) throw DomainError("subset rank out of range");
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(k));
  int v = 1;
  for (int i = 0; i < k; ++i) {
    for (;; ++v) {
      const std::uint64_t block = *binomial_u64(d - v, k - i - 1);
      if (rank < block) break;
      rank -= block;
    }
    idx.push_back(v++);
  }
  return Subset(std::move(idx), d);
}

std::vector<std::uint64_t> sample_ranks(std::uint64_t universe, std::uint64_t count, std::uint64_t seed) {
  if (count > universe) throw DomainError("pool size exceeds the number of subsets");
  Engine rng(substream_seed(seed, {0x706f6f6cULL}));
  std::vector<std::uint64_t> out;
  if (count == universe) {
    out.resize(universe);
    for (std::uint64_t i = 0; i < universe; ++i) out[i] = i;
    return out;
  }
  // Floyd's algorithm: exactly `count` draws, uniform over all count-subsets.
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(count) * 2);
  for (std::uint64_t j = universe - count; j < universe; ++j) {
    std::uniform_int_distribution<std::uint64_t> pick(0, j);
    const std::uint64_t t = pick(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  out.assign(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

SubsetStream::SubsetStream(int d, int k, FullEnumeration) : d_(d), k_(k) {
  if (k < 1 || k > d) throw DomainError("subset enumeration requires 1 <= k <= d");
  const auto total = binomial_u64(d, k);
  if (!total) throw CapacityError("C(d,k) exceeds 2^63; full enumeration is not possible");
  size_ = *total;
  restart();
}

SubsetStream::SubsetStream(int d, int k, PoolEnumeration pool) : d_(d), k_(k), pooled_(true) {
  if (k < 1 || k > d) throw DomainError("subset enumeration requires 1 <= k <= d");
  const auto total = binomial_u64(d, k);
  if (!total) throw CapacityError("C(d,k) exceeds 2^63; cannot sample by rank");
  if (pool.size > *total)
    throw DomainError("pool size " + std::to_string(pool.size) + " exceeds C(d,k) = " +
                      std::to_string(*total));
  ranks_ = sample_ranks(*total, pool.size, pool.seed);
  size_ = pool.size;
  restart();
}

void SubsetStream::restart() {
  cursor_ = 0;
  if (!pooled_) {
    current_.resize(static_cast<std::size_t>(k_));
    for (int i = 0; i < k_; ++i) current_[static_cast<std::size_t>(i)] = i + 1;
  }
}

std::optional<Subset> SubsetStream::next() {
  if (cursor_ >= size_) return std::nullopt;
  if (pooled_) return subset_unrank(ranks_[cursor_++], d_, k_);
  Subset out(current_, d_);
  ++cursor_;
  // Advance to the lexicographic successor.
  int i = k_ - 1;
  while (i >= 0 && current_[static_cast<std::size_t>(i)] == d_ - k_ + i + 1) --i;
  if (i >= 0) {
    ++current_[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k_; ++j)
      current_[static_cast<std::size_t>(j)] = current_[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

}  // namespace exactsel
