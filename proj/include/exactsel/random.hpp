#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace exactsel {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the substream addressed by (master, path...). Depends only on the
/// address, never on how many draws other substreams consumed, so a subset
/// sees the same noise whether it is reached by full or pooled enumeration.
std::uint64_t substream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

Engine substream(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Chi-square variate with `dof` degrees of freedom (dof may be 0) and
/// noncentrality `lambda`: (Z + sqrt(lambda))^2 + chi2_{dof-1} when lambda > 0.
/// The draws consumed depend on lambda only through whether it is positive.
double noncentral_chi_square(Engine& rng, double dof, double lambda);

}  // namespace exactsel
