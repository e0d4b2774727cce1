#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace probeff {

struct BenchRow {
  std::string model;
  std::string algo;
  std::size_t size = 0;      // iteration count
  double seconds = 0.0;      // best of three
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit linear_fit(const std::vector<std::pair<double, double>>& points);

// Times one (model, algo) across the given iteration counts. simulate runs
// `size` independent seeded simulations; lw/mh run `size` iterations.
std::vector<BenchRow> bench_model(const std::string& model,
                                  const std::string& algo,
                                  const std::vector<std::size_t>& sizes,
                                  std::uint64_t seed);

// Five evenly spaced iteration counts, scaled so the smallest is measurable
// on this machine.
std::vector<std::size_t> calibrated_sizes(const std::string& model,
                                          const std::string& algo,
                                          std::uint64_t seed);

// Wall-clock growth checks: strictly positive monotone trend plus, for
// simulate and lw, an approximately linear fit (R^2 >= 0.95). mh is exempt
// from the linearity requirement.
struct BenchVerdict {
  bool monotone = false;
  bool linear_enough = false;
  LinearFit fit;
};
BenchVerdict assess_bench(const std::string& algo,
                          const std::vector<BenchRow>& rows);

}  // namespace probeff
