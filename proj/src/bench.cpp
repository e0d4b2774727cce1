#include "probeff/bench.hpp"

#include <chrono>

#include "probeff/registry.hpp"

namespace probeff {

LinearFit linear_fit(const std::vector<std::pair<double, double>>& points) {
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  LinearFit fit;
  const double denom = n * sxx - sx * sx;
  if (denom == 0) return fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean_y = sy / n;
  for (const auto& [x, y] : points) {
    const double e = y - (fit.intercept + fit.slope * x);
    ss_res += e * e;
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

namespace {

double time_once(const ModelEntry& entry, const std::string& algo,
                 std::size_t size, std::uint64_t seed) {
  const nlohmann::json input;  // model defaults
  const Env env = entry.default_env();
  const auto t0 = std::chrono::steady_clock::now();
  if (algo == "simulate") {
    for (std::size_t i = 0; i < size; ++i)
      entry.run_simulate(input, env, seed + i);
  } else if (algo == "lw") {
    entry.run_lw(size, input, env, seed);
  } else if (algo == "mh") {
    entry.run_mh(size, input, env, seed, false);
  } else {
    throw config_error("unknown algorithm '" + algo + "' in bench");
  }
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

std::vector<std::size_t> calibrated_sizes(const std::string& model,
                                          const std::string& algo,
                                          std::uint64_t seed) {
  const ModelEntry& entry = find_model(model);
  const double probe = time_once(entry, algo, 32, seed);
  const double per_iter = std::max(probe / 32.0, 1e-7);
  std::size_t base = static_cast<std::size_t>(0.05 / per_iter);
  base = std::max<std::size_t>(base, 16);
  std::vector<std::size_t> sizes;
  for (std::size_t k = 1; k <= 5; ++k) sizes.push_back(base * k);
  return sizes;
}

std::vector<BenchRow> bench_model(const std::string& model,
                                  const std::string& algo,
                                  const std::vector<std::size_t>& sizes,
                                  std::uint64_t seed) {
  const ModelEntry& entry = find_model(model);
  std::vector<BenchRow> rows;
  rows.reserve(sizes.size());
  for (std::size_t size : sizes) {
    double best = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
      const double t = time_once(entry, algo, size, seed);
      if (rep == 0 || t < best) best = t;
    }
    rows.push_back({model, algo, size, best});
  }
  return rows;
}

BenchVerdict assess_bench(const std::string& algo,
                          const std::vector<BenchRow>& rows) {
  BenchVerdict verdict;
  verdict.monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].seconds < rows[i - 1].seconds) verdict.monotone = false;
  std::vector<std::pair<double, double>> points;
  points.reserve(rows.size());
  for (const auto& row : rows)
    points.emplace_back(static_cast<double>(row.size), row.seconds);
  verdict.fit = linear_fit(points);
  verdict.linear_enough = algo == "mh" || verdict.fit.r2 >= 0.95;
  return verdict;
}

}  // namespace probeff
