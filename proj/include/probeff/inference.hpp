#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "probeff/model.hpp"

namespace probeff {

// Sample trace: addresses of executed Sample requests to the values drawn.
using STrace = std::map<Addr, PrimVal>;
// Log-probability trace over all executed Sample and Observe requests.
using LPTrace = std::map<Addr, double>;

inline EffectSignature simulate_signature() {
  return {obs_reader_effect(), dist_effect(), state_effect<STrace>(),
          observe_effect(), sample_effect()};
}

inline EffectSignature mh_signature() {
  return {obs_reader_effect(), dist_effect(), state_effect<STrace>(),
          state_effect<LPTrace>(), observe_effect(), sample_effect()};
}

// ---------------------------------------------------------------------------
// Trace transformations. Both use projection rather than discharge: nothing
// is handled or removed, so they place no constraint on signature order.

// Installs a State<STrace> update after every Sample request, recording the
// value its continuation receives under the request's address.
template <typename A>
Prog<A> trace_samples(const EffectSignature& sig, Prog<A> p) {
  if (p.is_pure()) return p;
  auto n = p.node();
  if (const SampleOp* s = project_sample(n->req)) {
    const Addr addr = s->addr;
    return Prog<A>::op(n->req, [sig, n, addr](Boxed v) {
      PrimVal x = unbox<PrimVal>(Boxed(v));
      auto record = call(sig, make_modify<STrace>([addr, x = std::move(x)](STrace t) {
        t.insert_or_assign(addr, x);
        return t;
      }));
      return bind(std::move(record), [sig, n, v = std::move(v)](Unit) mutable {
        return trace_samples(sig, n->k(std::move(v)));
      });
    });
  }
  return Prog<A>::op(n->req, [sig, n](Boxed v) {
    return trace_samples(sig, n->k(std::move(v)));
  });
}

// Installs a State<LPTrace> update after every Observe and Sample request:
// the log probability of the observed value, or of the value just sampled.
template <typename A>
Prog<A> trace_lps(const EffectSignature& sig, Prog<A> p) {
  if (p.is_pure()) return p;
  auto n = p.node();
  const bool is_sample = project_sample(n->req) != nullptr;
  const bool is_observe = project_observe(n->req) != nullptr;
  if (is_sample || is_observe) {
    return Prog<A>::op(n->req, [sig, n, is_sample](Boxed v) {
      Addr addr;
      double lp;
      if (is_sample) {
        const SampleOp* s = project_sample(n->req);
        addr = s->addr;
        lp = log_prob(s->dist, unbox<PrimVal>(Boxed(v)));
      } else {
        const ObserveOp* o = project_observe(n->req);
        addr = o->addr;
        lp = log_prob(o->dist, o->value);
      }
      auto record = call(sig, make_modify<LPTrace>([addr, lp](LPTrace t) {
        t.insert_or_assign(addr, lp);
        return t;
      }));
      return bind(std::move(record), [sig, n, v = std::move(v)](Unit) mutable {
        return trace_lps(sig, n->k(std::move(v)));
      });
    });
  }
  return Prog<A>::op(n->req, [sig, n](Boxed v) {
    return trace_lps(sig, n->k(std::move(v)));
  });
}

// ---------------------------------------------------------------------------
// Observe / Sample handlers.

// Returns each observed value to its continuation; no conditioning effects.
template <typename A>
Prog<A> handle_obs(Prog<A> p) {
  for (;;) {
    if (p.is_pure()) return p;
    auto n = p.node();
    Discharge d = discharge(n->req, observe_effect());
    if (auto* own = std::get_if<OpPayload>(&d)) {
      p = n->k(Boxed(PrimVal(std::get<ObserveOp>(*own).value)));
      continue;
    }
    auto fwd = std::get<EffectRequest>(std::move(d));
    return Prog<A>::op(std::move(fwd), [n](Boxed v) {
      return handle_obs(n->k(std::move(v)));
    });
  }
}

// Accumulates the log likelihood of the observed data: adds
// log_prob(d, y) at every Observe and pairs the total with the result.
template <typename A>
Prog<std::pair<A, double>> handle_obs_lw(double lp, Prog<A> p) {
  using Out = Prog<std::pair<A, double>>;
  for (;;) {
    if (p.is_pure()) return Out::pure({std::move(p).take_value(), lp});
    auto n = p.node();
    Discharge d = discharge(n->req, observe_effect());
    if (auto* own = std::get_if<OpPayload>(&d)) {
      const auto& o = std::get<ObserveOp>(*own);
      lp += log_prob(o.dist, o.value);
      p = n->k(Boxed(PrimVal(o.value)));
      continue;
    }
    auto fwd = std::get<EffectRequest>(std::move(d));
    return Out::op(std::move(fwd), [lp, n](Boxed v) {
      return handle_obs_lw(lp, n->k(std::move(v)));
    });
  }
}

// Dispatches the final effect: every remaining request must be a Sample,
// drawn with the run's random source. Always the last handler.
template <typename A>
A handle_samp(RandomSource& rng, Prog<A> p) {
  while (!p.is_pure()) {
    auto n = p.node();
    Discharge d = discharge(n->req, sample_effect());
    auto* own = std::get_if<OpPayload>(&d);
    if (!own)
      throw internal_error("handle_samp: residual " +
                           effect_id_name(n->req.effect()) +
                           " request (stack misassembled)");
    p = n->k(Boxed(sample(std::get<SampleOp>(*own).dist, rng)));
  }
  return std::move(p).take_value();
}

// Proposal kernel constants for real-valued proposal sites: half the moves
// redraw from the prior (global jumps), half perturb the stored value with a
// scaled normal step (local refinement along sharp conditionals).
inline constexpr double kMhWalkShare = 0.5;
inline double mh_walk_sigma(double v) {
  return 0.1 * std::max(std::abs(v), 0.25);
}
inline double mh_normal_pdf(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * 2.5066282746310005024);
}

// Draw for one Sample request during an MH re-run. The stored value is
// reused, unchanged, unless the address is the proposal site, has no stored
// value, or the stored value's kind no longer matches the distribution. At a
// real-valued proposal site with a stored value the fresh draw comes from
// the prior/random-walk mixture above; everywhere else it is a prior draw.
inline PrimVal lookup_sample(const STrace& trace, const Dist& d, const Addr& addr,
                             const Addr& proposal, RandomSource& rng) {
  auto it = trace.find(addr);
  const bool stored = it != trace.end() && kind_of(it->second) == d.base_kind();
  if (!(addr == proposal)) {
    if (stored) return it->second;
    return sample(d, rng);
  }
  if (stored && d.base_kind() == Kind::Real && rng.uniform01() < kMhWalkShare) {
    const double v = as_real(it->second);
    return v + mh_walk_sigma(v) * rng.standard_normal();
  }
  return sample(d, rng);
}

// Sample handler for MH: resolves every Sample through lookup_sample against
// the previous iteration's trace.
template <typename A>
A handle_samp_mh(const STrace& prev, const Addr& proposal, RandomSource& rng,
                 Prog<A> p) {
  while (!p.is_pure()) {
    auto n = p.node();
    Discharge d = discharge(n->req, sample_effect());
    auto* own = std::get_if<OpPayload>(&d);
    if (!own)
      throw internal_error("handle_samp_mh: residual " +
                           effect_id_name(n->req.effect()) +
                           " request (stack misassembled)");
    const auto& s = std::get<SampleOp>(*own);
    p = n->k(Boxed(lookup_sample(prev, s.dist, s.addr, proposal, rng)));
  }
  return std::move(p).take_value();
}

// ---------------------------------------------------------------------------
// Execution stacks.

template <typename A>
struct SimRun {
  A value;
  Env residual;
  STrace strace;
};

template <typename A>
SimRun<A> run_simulate(const Env& env, const Model<A>& m, RandomSource& rng) {
  const EffectSignature sig = simulate_signature();
  const EffectSignature rest = sig.tail().tail();
  auto core = handle_core(sig, env, m);
  auto traced = trace_samples(rest, std::move(core));
  auto stated = handle_state(STrace{}, std::move(traced));
  auto ready = handle_obs(std::move(stated));
  auto out = handle_samp(rng, std::move(ready));
  return {std::move(out.first.first), std::move(out.first.second),
          std::move(out.second)};
}

template <typename A>
struct LwRun {
  A value;
  Env residual;
  STrace strace;
  double log_weight;
};

template <typename A>
LwRun<A> run_lw(const Env& env, const Model<A>& m, RandomSource& rng) {
  const EffectSignature sig = simulate_signature();
  const EffectSignature rest = sig.tail().tail();
  auto core = handle_core(sig, env, m);
  auto traced = trace_samples(rest, std::move(core));
  auto stated = handle_state(STrace{}, std::move(traced));
  auto weighted = handle_obs_lw(0.0, std::move(stated));
  auto out = handle_samp(rng, std::move(weighted));
  return {std::move(out.first.first.first), std::move(out.first.first.second),
          std::move(out.first.second), out.second};
}

template <typename A>
struct MhRun {
  A value;
  Env residual;
  STrace strace;
  LPTrace lptrace;
};

template <typename A>
MhRun<A> run_mh(const Env& env, const STrace& prev, const Addr& proposal,
                const Model<A>& m, RandomSource& rng) {
  const EffectSignature sig = mh_signature();
  const EffectSignature rest = sig.tail().tail();
  auto core = handle_core(sig, env, m);
  auto ts = trace_samples(rest, std::move(core));
  auto tl = trace_lps(rest, std::move(ts));
  auto s1 = handle_state(STrace{}, std::move(tl));
  auto s2 = handle_state(LPTrace{}, std::move(s1));
  auto ready = handle_obs(std::move(s2));
  auto out = handle_samp_mh(prev, proposal, rng, std::move(ready));
  return {std::move(out.first.first.first), std::move(out.first.first.second),
          std::move(out.first.second), std::move(out.second)};
}

// ---------------------------------------------------------------------------
// Top-level wrappers.

// Groups trace entries by observable-variable tag (occurrence order) into an
// output environment with the same entry set as the input.
Env reify_output_env(const Env& input, const STrace& trace);

// Per-variable consumption report: how many provided values were consumed,
// how many were left over, and how often the variable fell back to sampling.
struct EnvUsageRow {
  std::string name;
  std::size_t provided = 0;
  std::size_t consumed = 0;
  std::size_t leftover = 0;
  std::size_t sampled = 0;
};
std::vector<EnvUsageRow> env_usage_report(const Env& input, const Env& residual,
                                          const STrace& trace);

template <typename A>
struct SimulateOutcome {
  A value;
  Env env_out;
  Env residual;
  STrace strace;
};

// Runs one simulation of model_fn(x) under env and reifies the sample trace
// into an output environment.
template <typename F, typename X>
auto simulate(F model_fn, const Env& env, X x, RandomSource& rng)
    -> SimulateOutcome<typename std::invoke_result_t<F, X>::value_type> {
  auto m = model_fn(std::move(x));
  auto run = run_simulate(env, m, rng);
  Env out = reify_output_env(env, run.strace);
  return {std::move(run.value), std::move(out), std::move(run.residual),
          std::move(run.strace)};
}

struct LwSample {
  Env env_out;
  double log_weight;
  STrace strace;
};

// Independent likelihood-weighting runs, one fresh random stream each.
// When given, *residual0 receives the first iteration's residual environment
// (for the consumption diagnostic).
template <typename F, typename X>
std::vector<LwSample> lw(std::size_t iterations, F model_fn, X x, const Env& env,
                         std::uint64_t master_seed, Env* residual0 = nullptr) {
  auto m = model_fn(std::move(x));
  std::vector<LwSample> out;
  out.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    RandomSource rng = RandomSource::stream(master_seed, i);
    auto run = run_lw(env, m, rng);
    if (i == 0 && residual0) *residual0 = run.residual;
    out.push_back({reify_output_env(env, run.strace), run.log_weight,
                   std::move(run.strace)});
  }
  return out;
}

// Proposal-site selection: half the moves pick uniformly among the
// observable-tagged sample sites (the variables inference is usually after),
// half uniformly among all sites. Untagged sites carry a family label with
// '!' in it, which observable-variable names cannot contain.
inline bool mh_site_is_tagged(const Addr& a) {
  return a.tag.find('!') == std::string::npos;
}

inline double mh_site_log_prob(const STrace& s, const Addr& site) {
  std::size_t tagged = 0;
  for (const auto& [a, v] : s)
    if (mh_site_is_tagged(a)) ++tagged;
  const double uniform = 1.0 / static_cast<double>(s.size());
  if (tagged == 0) return std::log(uniform);
  double q = 0.5 * uniform;
  if (mh_site_is_tagged(site)) q += 0.5 / static_cast<double>(tagged);
  return std::log(q);
}

// Log acceptance ratio for a single-site trace proposal. Wingate-style: the
// full trace log-probability ratio, corrected by the prior densities of
// values discarded from the old trace and freshly drawn in the new one, the
// proposal-site kernel densities (prior/walk mixture for real sites), and
// the site-selection probabilities under both traces.
double mh_log_accept_ratio(const STrace& s_old, const LPTrace& lp_old,
                           const STrace& s_new, const LPTrace& lp_new,
                           const Addr& proposal);

struct MhIterationRecord {
  std::size_t iteration = 0;
  bool accepted = false;
  bool restart = false;  // independence move: the whole trace was redrawn
  Addr proposal;         // meaningful only when !restart
  STrace strace;         // the candidate run's traces, kept also when rejected
  LPTrace lptrace;
};

struct MhOutcome {
  Env env_out;
  Env residual;  // iteration 0's residual environment, for diagnostics
  std::vector<MhIterationRecord> records;  // filled when record_iterations
};

// Share of iterations that propose a whole fresh trace (independence move)
// instead of a single-site update. All prior terms cancel in that move's
// ratio, leaving the observation-likelihood ratio; it is what lets a chain
// escape a self-consistent but poor latent trajectory.
inline constexpr double kMhRestartShare = 0.2;

// Sum of observation log-probabilities: the LPTrace restricted to addresses
// that are not sample sites.
inline double observe_log_sum(const STrace& s, const LPTrace& lp) {
  double total = 0;
  for (const auto& [addr, value] : lp)
    if (!s.count(addr)) total += value;
  return total;
}

// Trace-based Metropolis-Hastings. Iteration 0 runs with an empty trace and
// is accepted unconditionally. Each later iteration either proposes a fresh
// whole trace (restart move, kMhRestartShare of the time) or redraws one
// chosen sample address and reuses the rest. Every iteration's current
// values are appended per-tag to the output environment.
//
// A candidate run can abort with a model error when a reused value falls
// outside the support of a downstream distribution's parameter space (for
// example a reused binomial count exceeding a shrunken population). Such a
// trace has zero posterior density, so the proposal is rejected.
template <typename F, typename X>
MhOutcome mh(std::size_t iterations, F model_fn, X x, const Env& env,
             std::uint64_t master_seed, bool record_iterations = false) {
  auto m = model_fn(std::move(x));
  STrace cur_s;
  LPTrace cur_lp;
  std::map<std::string, std::vector<PrimVal>> buckets;
  MhOutcome outcome;
  for (std::size_t i = 0; i < iterations; ++i) {
    RandomSource rng = RandomSource::stream(master_seed, i);
    const bool restart = i > 0 && rng.uniform01() < kMhRestartShare;
    Addr proposal{"", 0};
    if (i > 0 && !restart) {
      std::vector<const Addr*> tagged;
      for (const auto& [a, v] : cur_s)
        if (mh_site_is_tagged(a)) tagged.push_back(&a);
      if (!tagged.empty() && rng.uniform01() < 0.5) {
        proposal = *tagged[rng.uniform_index(tagged.size())];
      } else {
        auto it = cur_s.begin();
        std::advance(it, rng.uniform_index(cur_s.size()));
        proposal = it->first;
      }
    }
    bool accepted = true;
    std::optional<MhRun<typename decltype(m)::value_type>> run;
    if (i == 0) {
      run = run_mh(env, cur_s, proposal, m, rng);
      if (run->strace.empty())
        throw model_error(
            "nothing to infer: the model has no sample sites under this "
            "environment");
      outcome.residual = run->residual;
    } else {
      const STrace empty;
      const STrace& prev = restart ? empty : cur_s;
      try {
        run = run_mh(env, prev, proposal, m, rng);
      } catch (const model_error&) {
        run.reset();  // zero-density candidate
      }
      if (run) {
        double lr;
        if (restart)
          lr = observe_log_sum(run->strace, run->lptrace) -
               observe_log_sum(cur_s, cur_lp);
        else
          lr = mh_log_accept_ratio(cur_s, cur_lp, run->strace, run->lptrace,
                                   proposal);
        // NaN (both traces impossible) compares false: reject.
        accepted = lr >= 0.0 || std::log(rng.uniform01()) < lr;
      } else {
        accepted = false;
      }
    }
    if (record_iterations) {
      if (run)
        outcome.records.push_back({i, accepted, restart, proposal, run->strace,
                                   run->lptrace});
      else
        outcome.records.push_back({i, false, restart, proposal, {}, {}});
    }
    if (accepted) {
      cur_s = std::move(run->strace);
      cur_lp = std::move(run->lptrace);
    }
    for (const auto& [addr, value] : cur_s) {
      if (env.has(addr.tag)) buckets[addr.tag].push_back(value);
    }
  }
  Env out = env;
  for (const auto& e : env.entries()) {
    auto it = buckets.find(e.name);
    out = out.set(e.name, it == buckets.end() ? std::vector<PrimVal>{}
                                              : std::move(it->second));
  }
  outcome.env_out = std::move(out);
  return outcome;
}

}  // namespace probeff
