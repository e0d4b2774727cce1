#pragma once

#include <cctype>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "probeff/builtin_effects.hpp"
#include "probeff/env.hpp"
#include "probeff/prog.hpp"

namespace probeff {

// A probabilistic model: a program over a signature containing at least the
// observable-reader and distribution effects, yielding A. The signature is
// supplied when the model is interpreted, so one model value can run under
// any handler stack. Build models through the smart constructors, mbind and
// the combinators below; model code never emits raw Sample/Observe requests.
template <typename A>
class Model {
 public:
  using value_type = A;
  using Builder = std::function<Prog<A>(const EffectSignature&)>;

  static Model from_builder(Builder b) { return Model(std::move(b)); }

  static Model pure(A value) {
    return Model([value = std::move(value)](const EffectSignature&) {
      return Prog<A>::pure(value);
    });
  }

  Prog<A> build(const EffectSignature& sig) const {
    if (!sig.find(obs_reader_effect()) || !sig.find(dist_effect()))
      throw internal_error(
          "model interpreted against a signature lacking ObsReader or Dist");
    return builder_(sig);
  }

 private:
  explicit Model(Builder b) : builder_(std::move(b)) {}
  Builder builder_;
};

// Model continuations are invoked through const copies; pass const-invocable
// (non-mutable) callables.
template <typename A, typename F>
auto mbind(Model<A> m, F f) -> std::invoke_result_t<F, A> {
  using MB = std::invoke_result_t<F, A>;
  return MB::from_builder(
      [m = std::move(m), f = std::move(f)](const EffectSignature& sig) {
        return bind(m.build(sig),
                    [f, sig](A x) { return f(std::move(x)).build(sig); });
      });
}

// Kleisli composition: (a -> Model b) then (b -> Model c).
template <typename F, typename G>
auto kleisli(F f, G g) {
  return [f = std::move(f), g = std::move(g)](auto x) {
    return mbind(f(std::move(x)), g);
  };
}

// n-fold Kleisli self-composition applied to x0; n = 0 is the identity.
// Nested right so interpretation keeps a constant wrapper depth per step.
template <typename A, typename F>
Model<A> kleisli_chain(std::size_t n, F f, A x0) {
  if (n == 0) return Model<A>::pure(std::move(x0));
  Model<A> head = f(x0);
  return mbind(std::move(head), [n, f](A x) {
    return kleisli_chain(n - 1, f, std::move(x));
  });
}

namespace detail {

template <typename X, typename F, typename Y>
Model<std::vector<Y>> traverse_from(std::shared_ptr<const std::vector<X>> xs,
                                    F f, std::size_t i, std::vector<Y> acc) {
  if (i == xs->size()) return Model<std::vector<Y>>::pure(std::move(acc));
  return mbind(f((*xs)[i]), [xs, f, i, acc = std::move(acc)](Y y) {
    std::vector<Y> next = acc;
    next.push_back(std::move(y));
    return traverse_from<X, F, Y>(xs, f, i + 1, std::move(next));
  });
}

}  // namespace detail

// Runs f over each element in order, collecting the results.
template <typename X, typename F,
          typename Y = typename std::invoke_result_t<F, X>::value_type>
Model<std::vector<Y>> traverse_model(std::vector<X> xs, F f) {
  auto shared = std::make_shared<const std::vector<X>>(std::move(xs));
  return detail::traverse_from<X, F, Y>(shared, std::move(f), 0, {});
}

// Writer operation for models, and the model-level handler that interprets
// it before the core pipeline runs.
template <typename W>
Model<Unit> tell(W chunk) {
  return Model<Unit>::from_builder(
      [chunk = std::move(chunk)](const EffectSignature& sig) {
        return call(sig, make_tell<W>(chunk));
      });
}

template <typename W, typename A>
Model<std::pair<A, W>> handle_writer_model(Model<A> m) {
  return Model<std::pair<A, W>>::from_builder(
      [m = std::move(m)](const EffectSignature& sig) {
        return handle_writer<W>(m.build(sig.with_head(writer_effect<W>())));
      });
}

// ---------------------------------------------------------------------------
// Smart constructors. The tagged form asks the environment for the variable's
// next value and conditions on it when present; the overload without a
// variable always samples. Parameters are validated immediately.

namespace detail {

template <typename A, typename Retag>
Model<A> dist_model(Family fam, std::optional<std::string> tag, Retag retag) {
  { Dist probe(fam, std::nullopt, tag); }  // fail fast on bad parameters
  return Model<A>::from_builder(
      [fam = std::move(fam), tag, retag](const EffectSignature& sig) -> Prog<A> {
        auto finish = [retag, sig](Dist d) {
          return bind(call(sig, DistOp{std::move(d)}), [retag](PrimVal v) {
            return Prog<A>::pure(retag(std::move(v)));
          });
        };
        if (!tag) return finish(Dist(fam, std::nullopt, std::nullopt));
        return bind(call(sig, AskOp{*tag}),
                    [fam, tag, finish](std::optional<PrimVal> maybe_v) {
                      return finish(Dist(fam, std::move(maybe_v), tag));
                    });
      });
}

inline double retag_real(PrimVal v) { return as_real(v); }
inline std::int64_t retag_int(PrimVal v) { return as_int(v); }
inline bool retag_bool(PrimVal v) { return as_bool(v); }
inline std::vector<double> retag_vec(PrimVal v) { return as_vec(v); }
inline PrimVal retag_id(PrimVal v) { return v; }

}  // namespace detail

inline Model<double> normal(double mu, double sigma, const ObsVar& x) {
  return detail::dist_model<double>(NormalF{mu, sigma}, x.name(), detail::retag_real);
}
inline Model<double> normal(double mu, double sigma) {
  return detail::dist_model<double>(NormalF{mu, sigma}, std::nullopt, detail::retag_real);
}

inline Model<double> uniform(double lo, double hi, const ObsVar& x) {
  return detail::dist_model<double>(UniformF{lo, hi}, x.name(), detail::retag_real);
}
inline Model<double> uniform(double lo, double hi) {
  return detail::dist_model<double>(UniformF{lo, hi}, std::nullopt, detail::retag_real);
}

inline Model<bool> bernoulli(double p, const ObsVar& x) {
  return detail::dist_model<bool>(BernoulliF{p}, x.name(), detail::retag_bool);
}
inline Model<bool> bernoulli(double p) {
  return detail::dist_model<bool>(BernoulliF{p}, std::nullopt, detail::retag_bool);
}

inline Model<std::int64_t> binomial(std::int64_t n, double p, const ObsVar& x) {
  return detail::dist_model<std::int64_t>(BinomialF{n, p}, x.name(), detail::retag_int);
}
inline Model<std::int64_t> binomial(std::int64_t n, double p) {
  return detail::dist_model<std::int64_t>(BinomialF{n, p}, std::nullopt, detail::retag_int);
}

inline Model<double> beta(double a, double b, const ObsVar& x) {
  return detail::dist_model<double>(BetaF{a, b}, x.name(), detail::retag_real);
}
inline Model<double> beta(double a, double b) {
  return detail::dist_model<double>(BetaF{a, b}, std::nullopt, detail::retag_real);
}

inline Model<double> gamma(double shape, double scale, const ObsVar& x) {
  return detail::dist_model<double>(GammaF{shape, scale}, x.name(), detail::retag_real);
}
inline Model<double> gamma(double shape, double scale) {
  return detail::dist_model<double>(GammaF{shape, scale}, std::nullopt, detail::retag_real);
}

inline Model<std::int64_t> poisson(double rate, const ObsVar& x) {
  return detail::dist_model<std::int64_t>(PoissonF{rate}, x.name(), detail::retag_int);
}
inline Model<std::int64_t> poisson(double rate) {
  return detail::dist_model<std::int64_t>(PoissonF{rate}, std::nullopt, detail::retag_int);
}

inline Model<PrimVal> discrete(std::vector<std::pair<PrimVal, double>> items,
                               const ObsVar& x) {
  return detail::dist_model<PrimVal>(DiscreteF{std::move(items)}, x.name(),
                                     detail::retag_id);
}
inline Model<PrimVal> discrete(std::vector<std::pair<PrimVal, double>> items) {
  return detail::dist_model<PrimVal>(DiscreteF{std::move(items)}, std::nullopt,
                                     detail::retag_id);
}

inline Model<std::vector<double>> dirichlet(std::vector<double> alphas,
                                            const ObsVar& x) {
  return detail::dist_model<std::vector<double>>(DirichletF{std::move(alphas)},
                                                 x.name(), detail::retag_vec);
}
inline Model<std::vector<double>> dirichlet(std::vector<double> alphas) {
  return detail::dist_model<std::vector<double>>(DirichletF{std::move(alphas)},
                                                 std::nullopt, detail::retag_vec);
}

// ---------------------------------------------------------------------------
// Specialisation handlers.

// Interprets Ask requests against a model environment: each Ask takes the
// head of the variable's value list (consuming it), or yields nothing when
// the list is exhausted. Consumption order equals execution order, so no
// observed value is conditioned on more than once. The final working
// environment is returned alongside the result for consumption diagnostics.
template <typename A>
Prog<std::pair<A, Env>> handle_read(Env env, Prog<A> p) {
  using Out = Prog<std::pair<A, Env>>;
  for (;;) {
    if (p.is_pure())
      return Out::pure({std::move(p).take_value(), std::move(env)});
    auto n = p.node();
    Discharge d = discharge(n->req, obs_reader_effect());
    if (auto* own = std::get_if<OpPayload>(&d)) {
      const auto& ask = std::get<AskOp>(*own);
      std::vector<PrimVal> vs = env.get(ask.name);
      std::optional<PrimVal> head;
      if (!vs.empty()) {
        head = std::move(vs.front());
        vs.erase(vs.begin());
        env = env.set(ask.name, std::move(vs));
      }
      p = n->k(Boxed(std::move(head)));
      continue;
    }
    auto fwd = std::get<EffectRequest>(std::move(d));
    return Out::op(std::move(fwd), [env = std::move(env), n](Boxed v) mutable {
      return handle_read(std::move(env), n->k(std::move(v)));
    });
  }
}

// Address bookkeeping for handle_dist: tagged nodes count runtime hits per
// tag; untagged nodes get a per-family label in handling order plus a digest
// of the distribution's support. Both are deterministic functions of the
// request sequence, so repeated runs of the same model assign identical
// addresses.
//
// The support digest decides how much an inference iteration may reuse: a
// site keeps its address (and its old value, rescored under the new
// parameters) while its support is intact, but a support shift (say a
// binomial count whose population argument moved) retires the address, and
// every such site is drawn fresh. Reused values therefore always lie inside
// the support they are scored against.
struct AddrCounters {
  std::map<std::string, std::int64_t> tag_hits;
  std::map<std::string, std::int64_t> family_calls;

  Addr next(const Dist& d) {
    if (d.tag()) return Addr{*d.tag(), tag_hits[*d.tag()]++};
    std::string fam = d.family_name();
    for (char& ch : fam) ch = static_cast<char>(std::tolower(ch));
    char digest[20];
    std::snprintf(digest, sizeof(digest), "~%016llx",
                  static_cast<unsigned long long>(support_fingerprint(d.family())));
    return Addr{fam + "!" + std::to_string(family_calls[fam]++) + digest, 0};
  }
};

// Rewrites each distribution request into Observe (observed value present)
// or Sample (absent), assigning runtime addresses. `rest` is the signature
// after Dist is discharged; it must contain Sample and Observe.
template <typename A>
Prog<A> handle_dist(const EffectSignature& rest, Prog<A> p,
                    AddrCounters counters = {}) {
  if (p.is_pure()) return p;
  auto n = p.node();
  Discharge d = discharge(n->req, dist_effect());
  if (auto* own = std::get_if<OpPayload>(&d)) {
    const Dist& dist = std::get<DistOp>(*own).dist;
    const Addr addr = counters.next(dist);
    OpPayload next =
        dist.obs() ? OpPayload(ObserveOp{dist, *dist.obs(), addr})
                   : OpPayload(SampleOp{dist, addr});
    return Prog<A>::op(inject(std::move(next), rest),
                       [rest, n, counters = std::move(counters)](Boxed v) mutable {
                         return handle_dist(rest, n->k(std::move(v)),
                                            std::move(counters));
                       });
  }
  auto fwd = std::get<EffectRequest>(std::move(d));
  return Prog<A>::op(std::move(fwd),
                     [rest, n, counters = std::move(counters)](Boxed v) mutable {
                       return handle_dist(rest, n->k(std::move(v)),
                                          std::move(counters));
                     });
}

// Specialises a multimodal model against an environment: handle_read then
// handle_dist. `full` must start with ObsReader and Dist; the result is a
// program over the remaining signature whose probabilistic operations are
// explicit Sample/Observe requests.
template <typename A>
Prog<std::pair<A, Env>> handle_core(const EffectSignature& full, const Env& env,
                                    const Model<A>& m) {
  if (full.size() < 2 || !(full.at(0) == obs_reader_effect()) ||
      !(full.at(1) == dist_effect()))
    throw internal_error("handle_core: signature must start with ObsReader, Dist");
  EffectSignature rest = full.tail().tail();
  return handle_dist(rest, handle_read(env, m.build(full)));
}

// Debug walker for specialised trees: runs a program consisting of Observe
// and Sample requests, drawing samples from rng, and renders one line per
// node ("addr OpKind Family(params) [obs=..] -> value").
template <typename A>
A drive_specialised(Prog<A> p, RandomSource& rng,
                    std::vector<std::string>* lines = nullptr) {
  while (!p.is_pure()) {
    const EffectRequest& req = p.request();
    if (const ObserveOp* o = project_observe(req)) {
      if (lines)
        lines->push_back(addr_to_string(o->addr) + " Observe " +
                         o->dist.describe() + " -> " + prim_to_string(o->value));
      p = p.resume(Boxed(PrimVal(o->value)));
      continue;
    }
    if (const SampleOp* s = project_sample(req)) {
      PrimVal v = sample(s->dist, rng);
      if (lines)
        lines->push_back(addr_to_string(s->addr) + " Sample " +
                         s->dist.describe() + " -> " + prim_to_string(v));
      p = p.resume(Boxed(std::move(v)));
      continue;
    }
    throw internal_error("drive_specialised: unexpected " +
                         effect_id_name(req.effect()) + " request");
  }
  return std::move(p).take_value();
}

}  // namespace probeff
