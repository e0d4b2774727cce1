#include "probeff/dist.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "probeff/rng.hpp"

namespace probeff {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

bool finite(double x) { return std::isfinite(x); }

[[noreturn]] void bad_params(const std::string& what,
                             const std::optional<std::string>& tag) {
  std::string msg = "invalid distribution parameters: " + what;
  if (tag) msg += " (observable variable '" + *tag + "')";
  throw model_error(msg);
}

void validate(const Family& f, const std::optional<std::string>& tag) {
  std::visit(
      [&](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, NormalF>) {
          if (!finite(fam.mu) || !finite(fam.sigma) || fam.sigma <= 0)
            bad_params("Normal requires finite mu and sigma > 0", tag);
        } else if constexpr (std::is_same_v<T, UniformF>) {
          if (!finite(fam.lo) || !finite(fam.hi) || !(fam.lo < fam.hi))
            bad_params("Uniform requires lo < hi", tag);
        } else if constexpr (std::is_same_v<T, BernoulliF>) {
          if (!(fam.p >= 0.0 && fam.p <= 1.0))
            bad_params("Bernoulli requires p in [0, 1]", tag);
        } else if constexpr (std::is_same_v<T, BinomialF>) {
          if (fam.n < 0) bad_params("Binomial requires n >= 0", tag);
          if (!(fam.p >= 0.0 && fam.p <= 1.0))
            bad_params("Binomial requires p in [0, 1]", tag);
        } else if constexpr (std::is_same_v<T, BetaF>) {
          if (!finite(fam.a) || !finite(fam.b) || fam.a <= 0 || fam.b <= 0)
            bad_params("Beta requires a > 0 and b > 0", tag);
        } else if constexpr (std::is_same_v<T, GammaF>) {
          if (!finite(fam.shape) || !finite(fam.scale) || fam.shape <= 0 ||
              fam.scale <= 0)
            bad_params("Gamma requires shape > 0 and scale > 0", tag);
        } else if constexpr (std::is_same_v<T, PoissonF>) {
          if (!finite(fam.rate) || fam.rate < 0)
            bad_params("Poisson requires rate >= 0", tag);
        } else if constexpr (std::is_same_v<T, DiscreteF>) {
          if (fam.items.empty()) bad_params("Discrete requires items", tag);
          double total = 0.0;
          const Kind k = kind_of(fam.items.front().first);
          for (const auto& [v, w] : fam.items) {
            if (kind_of(v) != k)
              bad_params("Discrete items must share one kind", tag);
            if (!(w >= 0.0) || !finite(w))
              bad_params("Discrete weights must be >= 0", tag);
            total += w;
          }
          if (total <= 0.0) bad_params("Discrete weights must not all be zero", tag);
        } else if constexpr (std::is_same_v<T, DirichletF>) {
          if (fam.alphas.empty()) bad_params("Dirichlet requires alphas", tag);
          for (double a : fam.alphas)
            if (!finite(a) || a <= 0.0)
              bad_params("Dirichlet requires all alphas > 0", tag);
        }
      },
      f);
}

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n + 1)) -
         std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

// xlogy with the 0 * log(0) = 0 convention.
double xlogy(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log(y);
}

double gamma_draw(double shape, RandomSource& rng) {
  // Marsaglia-Tsang; boost for shape < 1.
  if (shape < 1.0) {
    const double u = rng.uniform01();
    return gamma_draw(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

std::int64_t binomial_draw(std::int64_t n, double p, RandomSource& rng) {
  // Degenerate parameters consume no randomness; this keeps draw streams
  // aligned when a sub-model is switched off by a zero rate.
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (n > 1000000)
    throw model_error("Binomial sampling capped at n <= 1e6");
  const double q = std::min(p, 1.0 - p);
  if (static_cast<double>(n) * q < 30.0) {
    // CDF inversion via the pmf recurrence, walking from 0 (or from n when
    // p is close to 1, mirroring for numerical range).
    const bool flip = p > 0.5;
    const double pp = flip ? 1.0 - p : p;
    const double ratio = pp / (1.0 - pp);
    double pmf = std::pow(1.0 - pp, static_cast<double>(n));
    double cdf = pmf;
    const double u = rng.uniform01();
    std::int64_t k = 0;
    while (u > cdf && k < n) {
      pmf *= ratio * static_cast<double>(n - k) / static_cast<double>(k + 1);
      ++k;
      cdf += pmf;
    }
    return flip ? n - k : k;
  }
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < n; ++i)
    if (rng.uniform01() < p) ++hits;
  return hits;
}

std::int64_t poisson_draw(double rate, RandomSource& rng) {
  if (rate == 0.0) return 0;
  // Count unit-exponential inter-arrival times; stable for all rates used
  // here (the product-of-uniforms form underflows past rate ~700).
  double acc = 0.0;
  std::int64_t k = -1;
  while (acc < rate) {
    double u = rng.uniform01();
    while (u <= 0.0) u = rng.uniform01();
    acc += -std::log(u);
    ++k;
  }
  return k;
}

}  // namespace

Dist::Dist(Family family, std::optional<PrimVal> obs,
           std::optional<std::string> tag)
    : family_(std::move(family)), obs_(std::move(obs)), tag_(std::move(tag)) {
  validate(family_, tag_);
  if (obs_ && kind_of(*obs_) != family_base_kind(family_)) {
    std::string msg = "observed value kind " +
                      std::string(kind_name(kind_of(*obs_))) +
                      " does not match " + family_display_name(family_) +
                      " base kind " +
                      std::string(kind_name(family_base_kind(family_)));
    if (tag_) msg += " (observable variable '" + *tag_ + "')";
    throw model_error(msg);
  }
}

Kind Dist::base_kind() const { return family_base_kind(family_); }
std::string Dist::family_name() const { return family_display_name(family_); }

Dist Dist::with_obs(std::optional<PrimVal> obs) const {
  return Dist(family_, std::move(obs), tag_);
}

Kind family_base_kind(const Family& f) {
  return std::visit(
      [](const auto& fam) -> Kind {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, NormalF> || std::is_same_v<T, UniformF> ||
                      std::is_same_v<T, BetaF> || std::is_same_v<T, GammaF>)
          return Kind::Real;
        else if constexpr (std::is_same_v<T, BernoulliF>)
          return Kind::Bool;
        else if constexpr (std::is_same_v<T, BinomialF> ||
                           std::is_same_v<T, PoissonF>)
          return Kind::Int;
        else if constexpr (std::is_same_v<T, DiscreteF>)
          return kind_of(fam.items.front().first);
        else
          return Kind::Vec;
      },
      f);
}

std::string family_display_name(const Family& f) {
  return std::visit(
      [](const auto& fam) -> std::string {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, NormalF>) return "Normal";
        else if constexpr (std::is_same_v<T, UniformF>) return "Uniform";
        else if constexpr (std::is_same_v<T, BernoulliF>) return "Bernoulli";
        else if constexpr (std::is_same_v<T, BinomialF>) return "Binomial";
        else if constexpr (std::is_same_v<T, BetaF>) return "Beta";
        else if constexpr (std::is_same_v<T, GammaF>) return "Gamma";
        else if constexpr (std::is_same_v<T, PoissonF>) return "Poisson";
        else if constexpr (std::is_same_v<T, DiscreteF>) return "Discrete";
        else return "Dirichlet";
      },
      f);
}

std::string Dist::describe() const {
  std::string out = family_name() + "(";
  std::visit(
      [&](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, NormalF>)
          out += real_to_string(fam.mu) + ", " + real_to_string(fam.sigma);
        else if constexpr (std::is_same_v<T, UniformF>)
          out += real_to_string(fam.lo) + ", " + real_to_string(fam.hi);
        else if constexpr (std::is_same_v<T, BernoulliF>)
          out += real_to_string(fam.p);
        else if constexpr (std::is_same_v<T, BinomialF>)
          out += std::to_string(fam.n) + ", " + real_to_string(fam.p);
        else if constexpr (std::is_same_v<T, BetaF>)
          out += real_to_string(fam.a) + ", " + real_to_string(fam.b);
        else if constexpr (std::is_same_v<T, GammaF>)
          out += real_to_string(fam.shape) + ", " + real_to_string(fam.scale);
        else if constexpr (std::is_same_v<T, PoissonF>)
          out += real_to_string(fam.rate);
        else if constexpr (std::is_same_v<T, DiscreteF>) {
          for (std::size_t i = 0; i < fam.items.size(); ++i) {
            if (i) out += ", ";
            out += prim_to_string(fam.items[i].first) + ":" +
                   real_to_string(fam.items[i].second);
          }
        } else {
          for (std::size_t i = 0; i < fam.alphas.size(); ++i) {
            if (i) out += ", ";
            out += real_to_string(fam.alphas[i]);
          }
        }
      },
      family_);
  out += ")";
  if (obs_) out += " obs=" + prim_to_string(*obs_);
  return out;
}

namespace {

std::uint64_t mix_bits(std::uint64_t acc, std::uint64_t x) {
  return splitmix64(acc ^ (x + 0x9e3779b97f4a7c15ULL + (acc << 6) + (acc >> 2)));
}

std::uint64_t mix_real(std::uint64_t acc, double x) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(x));
  std::memcpy(&bits, &x, sizeof(bits));
  return mix_bits(acc, bits);
}

std::uint64_t mix_prim(std::uint64_t acc, const PrimVal& v) {
  acc = mix_bits(acc, v.index());
  switch (v.index()) {
    case 0: return mix_real(acc, std::get<double>(v));
    case 1: return mix_bits(acc, static_cast<std::uint64_t>(std::get<std::int64_t>(v)));
    case 2: return mix_bits(acc, std::get<bool>(v) ? 1 : 0);
    default: {
      for (double x : std::get<std::vector<double>>(v)) acc = mix_real(acc, x);
      return acc;
    }
  }
}

}  // namespace

std::uint64_t support_fingerprint(const Family& f) {
  std::uint64_t acc = mix_bits(0x8d1f3a2cc0ffee11ULL, f.index());
  std::visit(
      [&](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, UniformF>) {
          acc = mix_real(mix_real(acc, fam.lo), fam.hi);
        } else if constexpr (std::is_same_v<T, BinomialF>) {
          acc = mix_bits(acc, static_cast<std::uint64_t>(fam.n));
        } else if constexpr (std::is_same_v<T, DiscreteF>) {
          for (const auto& [v, w] : fam.items) acc = mix_prim(acc, v);
        } else if constexpr (std::is_same_v<T, DirichletF>) {
          acc = mix_bits(acc, fam.alphas.size());
        }
        // Normal, Bernoulli, Beta, Gamma, Poisson: support is fixed by the
        // family alone.
      },
      f);
  return acc;
}

PrimVal sample(const Dist& d, RandomSource& rng) {
  return std::visit(
      [&](const auto& fam) -> PrimVal {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, NormalF>) {
          return fam.mu + fam.sigma * rng.standard_normal();
        } else if constexpr (std::is_same_v<T, UniformF>) {
          return fam.lo + (fam.hi - fam.lo) * rng.uniform01();
        } else if constexpr (std::is_same_v<T, BernoulliF>) {
          if (fam.p == 0.0) return false;
          if (fam.p == 1.0) return true;
          return rng.uniform01() < fam.p;
        } else if constexpr (std::is_same_v<T, BinomialF>) {
          return binomial_draw(fam.n, fam.p, rng);
        } else if constexpr (std::is_same_v<T, BetaF>) {
          const double x = gamma_draw(fam.a, rng);
          const double y = gamma_draw(fam.b, rng);
          return x / (x + y);
        } else if constexpr (std::is_same_v<T, GammaF>) {
          return fam.scale * gamma_draw(fam.shape, rng);
        } else if constexpr (std::is_same_v<T, PoissonF>) {
          return poisson_draw(fam.rate, rng);
        } else if constexpr (std::is_same_v<T, DiscreteF>) {
          double total = 0.0;
          for (const auto& it : fam.items) total += it.second;
          const double u = rng.uniform01() * total;
          double cum = 0.0;
          for (const auto& it : fam.items) {
            cum += it.second;
            if (u < cum) return it.first;
          }
          // Only reachable through floating-point rounding at the far edge;
          // fall back to the last positive-weight item.
          for (auto it = fam.items.rbegin(); it != fam.items.rend(); ++it)
            if (it->second > 0.0) return it->first;
          return fam.items.back().first;
        } else {
          std::vector<double> draws(fam.alphas.size());
          double total = 0.0;
          for (std::size_t i = 0; i < fam.alphas.size(); ++i) {
            draws[i] = gamma_draw(fam.alphas[i], rng);
            total += draws[i];
          }
          for (double& x : draws) x /= total;
          return draws;
        }
      },
      d.family());
}

double log_prob(const Dist& d, const PrimVal& v) {
  if (kind_of(v) != d.base_kind())
    throw model_error("log_prob: value kind " +
                      std::string(kind_name(kind_of(v))) + " does not match " +
                      d.family_name() + " base kind " +
                      kind_name(d.base_kind()));
  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, NormalF>) {
          const double x = std::get<double>(v);
          const double z = (x - fam.mu) / fam.sigma;
          return -0.5 * (kLogTwoPi + z * z) - std::log(fam.sigma);
        } else if constexpr (std::is_same_v<T, UniformF>) {
          const double x = std::get<double>(v);
          if (x < fam.lo || x > fam.hi) return kNegInf;
          return -std::log(fam.hi - fam.lo);
        } else if constexpr (std::is_same_v<T, BernoulliF>) {
          const bool b = std::get<bool>(v);
          const double p = b ? fam.p : 1.0 - fam.p;
          return p > 0.0 ? std::log(p) : kNegInf;
        } else if constexpr (std::is_same_v<T, BinomialF>) {
          const std::int64_t k = std::get<std::int64_t>(v);
          if (k < 0 || k > fam.n) return kNegInf;
          if (fam.p == 0.0) return k == 0 ? 0.0 : kNegInf;
          if (fam.p == 1.0) return k == fam.n ? 0.0 : kNegInf;
          return log_choose(fam.n, k) + xlogy(static_cast<double>(k), fam.p) +
                 xlogy(static_cast<double>(fam.n - k), 1.0 - fam.p);
        } else if constexpr (std::is_same_v<T, BetaF>) {
          const double x = std::get<double>(v);
          if (x <= 0.0 || x >= 1.0) return kNegInf;
          const double log_beta = std::lgamma(fam.a) + std::lgamma(fam.b) -
                                  std::lgamma(fam.a + fam.b);
          return (fam.a - 1.0) * std::log(x) +
                 (fam.b - 1.0) * std::log1p(-x) - log_beta;
        } else if constexpr (std::is_same_v<T, GammaF>) {
          const double x = std::get<double>(v);
          if (x <= 0.0) return kNegInf;
          return (fam.shape - 1.0) * std::log(x) - x / fam.scale -
                 std::lgamma(fam.shape) - fam.shape * std::log(fam.scale);
        } else if constexpr (std::is_same_v<T, PoissonF>) {
          const std::int64_t k = std::get<std::int64_t>(v);
          if (k < 0) return kNegInf;
          if (fam.rate == 0.0) return k == 0 ? 0.0 : kNegInf;
          return xlogy(static_cast<double>(k), fam.rate) - fam.rate -
                 std::lgamma(static_cast<double>(k + 1));
        } else if constexpr (std::is_same_v<T, DiscreteF>) {
          double total = 0.0, hit = 0.0;
          bool found = false;
          for (const auto& it : fam.items) {
            total += it.second;
            if (!found && prim_equal(it.first, v)) {
              hit = it.second;
              found = true;
            }
          }
          if (!found || hit <= 0.0) return kNegInf;
          return std::log(hit / total);
        } else {
          const auto& xs = std::get<std::vector<double>>(v);
          if (xs.size() != fam.alphas.size()) return kNegInf;
          double sum = 0.0, lp = 0.0, alpha0 = 0.0;
          for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] <= 0.0) return kNegInf;
            sum += xs[i];
            lp += (fam.alphas[i] - 1.0) * std::log(xs[i]) -
                  std::lgamma(fam.alphas[i]);
            alpha0 += fam.alphas[i];
          }
          if (std::abs(sum - 1.0) > 1e-9) return kNegInf;
          return lp + std::lgamma(alpha0);
        }
      },
      d.family());
}

}  // namespace probeff
