#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "probeff/primval.hpp"
#include "probeff/rng.hpp"

namespace probeff {

// Primitive distribution families. Parameter constraints are checked when a
// Dist is constructed; invalid parameters raise model_error.
struct NormalF {
  double mu, sigma;  // sigma > 0
};
struct UniformF {
  double lo, hi;  // lo < hi
};
struct BernoulliF {
  double p;  // p in [0, 1]
};
struct BinomialF {
  std::int64_t n;  // n >= 0
  double p;        // p in [0, 1]
};
struct BetaF {
  double a, b;  // a > 0, b > 0
};
struct GammaF {
  double shape, scale;  // both > 0
};
struct PoissonF {
  double rate;  // rate >= 0; rate 0 is a point mass at 0
};
struct DiscreteF {
  // Weighted values of one common kind; weights >= 0, not all zero.
  // Weights are normalised internally, callers need not sum them to 1.
  std::vector<std::pair<PrimVal, double>> items;
};
struct DirichletF {
  std::vector<double> alphas;  // nonempty, all > 0
};

using Family = std::variant<NormalF, UniformF, BernoulliF, BinomialF, BetaF,
                            GammaF, PoissonF, DiscreteF, DirichletF>;

// A primitive-distribution descriptor: family + optional observed value +
// optional observable-variable tag. The observed value, when present, decides
// later whether the node runs in observe mode; it must match the family's
// base kind (support membership is not enforced; an out-of-support
// observation simply carries log-probability -inf).
class Dist {
 public:
  Dist(Family family, std::optional<PrimVal> obs = std::nullopt,
       std::optional<std::string> tag = std::nullopt);

  const Family& family() const { return family_; }
  const std::optional<PrimVal>& obs() const { return obs_; }
  const std::optional<std::string>& tag() const { return tag_; }

  Kind base_kind() const;
  std::string family_name() const;
  std::string describe() const;  // e.g. "Uniform(0, 1) obs=0.5"

  Dist with_obs(std::optional<PrimVal> obs) const;

 private:
  Family family_;
  std::optional<PrimVal> obs_;
  std::optional<std::string> tag_;
};

// getObs: returns the observed slot unchanged.
inline const std::optional<PrimVal>& get_obs(const Dist& d) { return d.obs(); }

// Draw one value from d's support; deterministic given the source state.
PrimVal sample(const Dist& d, RandomSource& rng);

// Natural-log density (continuous) or mass (discrete) at v; -inf outside the
// support. The value's kind must match the family's base kind.
double log_prob(const Dist& d, const PrimVal& v);

Kind family_base_kind(const Family& f);
std::string family_display_name(const Family& f);

// Deterministic digest of the family and the parameters that determine its
// support (a binomial's n, a uniform's bounds, a discrete's value set, a
// dirichlet's dimension). Used to derive runtime addresses for untagged
// sites: a site keeps its address while its support is unchanged, so a
// value reused across inference iterations is always inside the support it
// is scored against; a support shift retires the address and the site is
// drawn fresh.
std::uint64_t support_fingerprint(const Family& f);

}  // namespace probeff
