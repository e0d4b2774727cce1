#pragma once

#include <cstdint>
#include <random>

namespace probeff {

// Seeded random source. One source per interpretation run, never shared.
//
// Stream splitting: stream(master, i) derives the i-th independent stream
// from a master seed by mixing (master, i) through splitmix64 and seeding a
// mersenne twister with the result. Top-level runs use stream index 0;
// iterative algorithms (lw, mh) give iteration i the stream index i, so any
// single iteration is reproducible in isolation.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  static RandomSource stream(std::uint64_t master_seed, std::uint64_t index);

  double uniform01();            // [0, 1)
  double standard_normal();
  std::uint64_t next_u64();
  std::size_t uniform_index(std::size_t n);  // {0, ..., n-1}, n >= 1

 private:
  std::mt19937_64 gen_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace probeff
