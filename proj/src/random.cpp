#include "exactsel/random.hpp"

#include <cmath>

namespace exactsel {

std::uint64_t substream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

Engine substream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Engine(substream_seed(master, path));
}

namespace {

double central_chi_square(Engine& rng, double dof) {
  if (dof <= 0.0) return 0.0;
  if (dof == 1.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double z = normal(rng);
    return z * z;
  }
  if (dof == 2.0) {
    // Exponential with mean 2.
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return -2.0 * std::log1p(-unif(rng));
  }
  std::gamma_distribution<double> gamma(0.5 * dof, 2.0);
  return gamma(rng);
}

}  // namespace

double noncentral_chi_square(Engine& rng, double dof, double lambda) {
  // The draw sequence depends on lambda only through lambda > 0, so runs that
  // differ only in (nonzero) signal strength see the same noise.
  if (dof <= 0.0) return 0.0;
  if (!(lambda > 0.0)) return central_chi_square(rng, dof);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double z = normal(rng) + std::sqrt(lambda);
  return z * z + central_chi_square(rng, dof - 1.0);
}

}  // namespace exactsel
