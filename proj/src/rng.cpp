#include "probeff/rng.hpp"

#include <cmath>

#include "probeff/errors.hpp"

namespace probeff {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed) : gen_(splitmix64(seed)) {}

RandomSource RandomSource::stream(std::uint64_t master_seed, std::uint64_t index) {
  // Two rounds keep nearby (seed, index) pairs far apart in state space.
  return RandomSource(splitmix64(splitmix64(master_seed) + index));
}

double RandomSource::uniform01() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RandomSource::standard_normal() {
  // Box-Muller, cosine branch only; stateless across calls so that a run's
  // draw sequence is a pure function of the engine state.
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

std::uint64_t RandomSource::next_u64() { return gen_(); }

std::size_t RandomSource::uniform_index(std::size_t n) {
  if (n == 0) throw internal_error("uniform_index: empty range");
  // Rejection sampling for an unbiased index.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = gen_();
  while (x >= limit) x = gen_();
  return static_cast<std::size_t>(x % n);
}

}  // namespace probeff
