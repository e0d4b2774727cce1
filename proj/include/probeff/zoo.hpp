#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "probeff/inference.hpp"
#include "probeff/model.hpp"

namespace probeff::zoo {

// Linear regression: mu ~ Normal(0,3), c ~ Normal(0,2), sigma ~ Uniform(1,3),
// y ~ Normal(mu*x + c, sigma).
Model<double> lin_regr(double x);

// Joint form over many inputs: parameters drawn once, one y per x.
Model<std::vector<double>> lin_regr_many(std::vector<double> xs);

// p ~ Uniform(0,1), y ~ Bernoulli(p).
Model<bool> coin_flip();

// Higher-order hidden Markov model: priors generate the transition and
// observation parameters, then n node steps are chained by Kleisli
// composition. `trans` and `obs` are arbitrary sub-models.
template <typename TP, typename OP, typename Lat, typename TransF, typename ObsF>
Model<Lat> hmm(Model<TP> trans_prior, Model<OP> obs_prior, TransF trans,
               ObsF obs, std::size_t n, Lat x0) {
  return mbind(std::move(trans_prior), [=](TP theta) {
    return mbind(obs_prior, [=](OP phi) {
      auto node = [=](Lat x_prev) {
        return mbind(trans(theta, std::move(x_prev)), [=](Lat x) {
          return mbind(obs(phi, x), [x](auto) { return Model<Lat>::pure(x); });
        });
      };
      return kleisli_chain(n, node, x0);
    });
  });
}

// Discrete HMM: latent integer state, dx/dy uniform priors, Bernoulli step,
// Binomial observation tagged "y". Built from the higher-order hmm above.
Model<std::int64_t> hmm_discrete(std::size_t n, std::int64_t x0);

// The same model written as one flat block, with no sub-model structure.
// Exists to check that the modular composition builds an identical tree.
Model<std::int64_t> hmm_discrete_monolithic(std::size_t n, std::int64_t x0);

// ---------------------------------------------------------------------------
// SIR epidemic model.

struct Popl {
  std::int64_t s = 0, i = 0, r = 0;
  friend bool operator==(const Popl&, const Popl&) = default;
};

struct SirTransParams {
  double beta, gamma;
};

// Susceptible -> infected: each of s is infected with prob 1 - e^(-beta*i/n).
Model<Popl> trans_si(double beta, Popl p);
// Infected -> recovered with prob 1 - e^(-gamma).
Model<Popl> trans_ir(double gamma, Popl p);
// Recovered -> susceptible with prob 1 - e^(-eta) (resusceptibility).
Model<Popl> trans_rs(double eta, Popl p);

Model<Popl> trans_sir(SirTransParams tp, Popl p);

// Reported infections: xi ~ Poisson(rho * i), tagged "xi".
Model<std::int64_t> obs_sir(double rho, Popl p);

Model<SirTransParams> trans_prior_sir();  // beta ~ Gamma(2,1), gamma ~ Gamma(1,1/8)
Model<double> obs_prior_sir();            // rho ~ Beta(2,7)

Model<Popl> hmm_sir(std::size_t days, Popl sir0);

// Writer-instrumented variant: also returns the trace of populations, one
// entry per transition step.
Model<std::pair<Popl, std::vector<Popl>>> hmm_sir_traced(std::size_t days,
                                                         Popl sir0);

// Resusceptibility extension: transition chain si -> ir -> rs, extra
// parameter eta (tagged "eta").
struct SirRsTransParams {
  double beta, gamma, eta;
};
Model<Popl> trans_sir_rs(SirRsTransParams tp, Popl p);
Model<SirRsTransParams> trans_prior_sir_rs();
Model<Popl> hmm_sir_rs(std::size_t days, Popl sir0);

// Vaccination extension on top of resusceptibility: four sub-populations,
// chain si -> ir -> rs -> sv, extra parameter omega (tagged "omega").
struct PoplV {
  std::int64_t s = 0, i = 0, r = 0, v = 0;
  friend bool operator==(const PoplV&, const PoplV&) = default;
};
struct SirVTransParams {
  double beta, gamma, eta, omega;
};
Model<PoplV> trans_sv(double omega, PoplV p);
Model<PoplV> trans_sir_rsv(SirVTransParams tp, PoplV p);
Model<SirVTransParams> trans_prior_sir_rsv();
Model<PoplV> hmm_sir_rsv(std::size_t days, PoplV sir0);

// ---------------------------------------------------------------------------
// Smoothed latent Dirichlet allocation over a fixed vocabulary: one document
// of `doc_len` words, `n_topics` topics. Topic mixture tagged "theta", topic
// word distributions tagged "phi" (one hit per topic), words tagged "w" as
// vocabulary indices. Yields the document as words.
Model<std::vector<std::string>> lda(std::vector<std::string> vocab,
                                    std::size_t n_topics, std::size_t doc_len);

}  // namespace probeff::zoo
