#include "probeff/zoo.hpp"

#include <cmath>

namespace probeff::zoo {

Model<double> lin_regr(double x) {
  return mbind(normal(0, 3, ObsVar("mu")), [x](double mu) {
    return mbind(normal(0, 2, ObsVar("c")), [x, mu](double c) {
      return mbind(uniform(1, 3, ObsVar("sigma")), [x, mu, c](double sigma) {
        return normal(mu * x + c, sigma, ObsVar("y"));
      });
    });
  });
}

Model<std::vector<double>> lin_regr_many(std::vector<double> xs) {
  return mbind(normal(0, 3, ObsVar("mu")), [xs](double mu) {
    return mbind(normal(0, 2, ObsVar("c")), [xs, mu](double c) {
      return mbind(uniform(1, 3, ObsVar("sigma")), [xs, mu, c](double sigma) {
        return traverse_model(xs, [mu, c, sigma](double x) {
          return normal(mu * x + c, sigma, ObsVar("y"));
        });
      });
    });
  });
}

Model<bool> coin_flip() {
  return mbind(uniform(0, 1, ObsVar("p")),
               [](double p) { return bernoulli(p, ObsVar("y")); });
}

Model<std::int64_t> hmm_discrete(std::size_t n, std::int64_t x0) {
  auto trans = [](double dx, std::int64_t x_prev) {
    return mbind(bernoulli(dx), [x_prev](bool step) {
      return Model<std::int64_t>::pure(x_prev + (step ? 1 : 0));
    });
  };
  auto obs = [](double dy, std::int64_t x) {
    return binomial(x, dy, ObsVar("y"));
  };
  return hmm(uniform(0, 1, ObsVar("dx")), uniform(0, 1, ObsVar("dy")), trans,
             obs, n, x0);
}

namespace {
Model<std::int64_t> hmm_mono_loop(double dx, double dy, std::size_t remaining,
                                  std::int64_t x_prev) {
  if (remaining == 0) return Model<std::int64_t>::pure(x_prev);
  return mbind(bernoulli(dx), [dx, dy, remaining, x_prev](bool step) {
    const std::int64_t x = x_prev + (step ? 1 : 0);
    return mbind(binomial(x, dy, ObsVar("y")),
                 [dx, dy, remaining, x](std::int64_t) {
                   return hmm_mono_loop(dx, dy, remaining - 1, x);
                 });
  });
}
}  // namespace

Model<std::int64_t> hmm_discrete_monolithic(std::size_t n, std::int64_t x0) {
  return mbind(uniform(0, 1, ObsVar("dx")), [n, x0](double dx) {
    return mbind(uniform(0, 1, ObsVar("dy")), [n, x0, dx](double dy) {
      return hmm_mono_loop(dx, dy, n, x0);
    });
  });
}

// --------------------------------------------------------------------------
// SIR

Model<Popl> trans_si(double beta, Popl p) {
  const std::int64_t n = p.s + p.i + p.r;
  const double prob =
      n > 0 ? 1.0 - std::exp(-beta * static_cast<double>(p.i) /
                             static_cast<double>(n))
            : 0.0;
  return mbind(binomial(p.s, prob), [p](std::int64_t dsi) {
    return Model<Popl>::pure(Popl{p.s - dsi, p.i + dsi, p.r});
  });
}

Model<Popl> trans_ir(double gamma_rate, Popl p) {
  return mbind(binomial(p.i, 1.0 - std::exp(-gamma_rate)),
               [p](std::int64_t dir) {
                 return Model<Popl>::pure(Popl{p.s, p.i - dir, p.r + dir});
               });
}

Model<Popl> trans_rs(double eta, Popl p) {
  return mbind(binomial(p.r, 1.0 - std::exp(-eta)), [p](std::int64_t drs) {
    return Model<Popl>::pure(Popl{p.s + drs, p.i, p.r - drs});
  });
}

Model<Popl> trans_sir(SirTransParams tp, Popl p) {
  auto si = [beta = tp.beta](Popl q) { return trans_si(beta, q); };
  auto ir = [gamma_rate = tp.gamma](Popl q) { return trans_ir(gamma_rate, q); };
  return kleisli(si, ir)(p);
}

Model<std::int64_t> obs_sir(double rho, Popl p) {
  return poisson(rho * static_cast<double>(p.i), ObsVar("xi"));
}

Model<SirTransParams> trans_prior_sir() {
  return mbind(gamma(2, 1, ObsVar("beta")), [](double beta) {
    return mbind(gamma(1, 0.125, ObsVar("gamma")), [beta](double gamma_rate) {
      return Model<SirTransParams>::pure(SirTransParams{beta, gamma_rate});
    });
  });
}

Model<double> obs_prior_sir() { return beta(2, 7, ObsVar("rho")); }

Model<Popl> hmm_sir(std::size_t days, Popl sir0) {
  return hmm(
      trans_prior_sir(), obs_prior_sir(),
      [](SirTransParams tp, Popl p) { return trans_sir(tp, p); },
      [](double rho, Popl p) { return obs_sir(rho, p); }, days, sir0);
}

Model<std::pair<Popl, std::vector<Popl>>> hmm_sir_traced(std::size_t days,
                                                         Popl sir0) {
  auto traced_trans = [](SirTransParams tp, Popl p) {
    return mbind(trans_sir(tp, p), [](Popl next) {
      return mbind(tell(std::vector<Popl>{next}),
                   [next](Unit) { return Model<Popl>::pure(next); });
    });
  };
  return handle_writer_model<std::vector<Popl>>(
      hmm(trans_prior_sir(), obs_prior_sir(), traced_trans,
          [](double rho, Popl p) { return obs_sir(rho, p); }, days, sir0));
}

Model<Popl> trans_sir_rs(SirRsTransParams tp, Popl p) {
  auto si = [beta = tp.beta](Popl q) { return trans_si(beta, q); };
  auto ir = [gamma_rate = tp.gamma](Popl q) { return trans_ir(gamma_rate, q); };
  auto rs = [eta = tp.eta](Popl q) { return trans_rs(eta, q); };
  return kleisli(kleisli(si, ir), rs)(p);
}

Model<SirRsTransParams> trans_prior_sir_rs() {
  return mbind(gamma(2, 1, ObsVar("beta")), [](double beta) {
    return mbind(gamma(1, 0.125, ObsVar("gamma")), [beta](double gamma_rate) {
      return mbind(gamma(1, 0.125, ObsVar("eta")), [beta, gamma_rate](double eta) {
        return Model<SirRsTransParams>::pure(
            SirRsTransParams{beta, gamma_rate, eta});
      });
    });
  });
}

Model<Popl> hmm_sir_rs(std::size_t days, Popl sir0) {
  return hmm(
      trans_prior_sir_rs(), obs_prior_sir(),
      [](SirRsTransParams tp, Popl p) { return trans_sir_rs(tp, p); },
      [](double rho, Popl p) { return obs_sir(rho, p); }, days, sir0);
}

// Vaccination variant works on the four-group population.
namespace {
Model<PoplV> trans_si_v(double beta, PoplV p) {
  const std::int64_t n = p.s + p.i + p.r + p.v;
  const double prob =
      n > 0 ? 1.0 - std::exp(-beta * static_cast<double>(p.i) /
                             static_cast<double>(n))
            : 0.0;
  return mbind(binomial(p.s, prob), [p](std::int64_t dsi) {
    return Model<PoplV>::pure(PoplV{p.s - dsi, p.i + dsi, p.r, p.v});
  });
}

Model<PoplV> trans_ir_v(double gamma_rate, PoplV p) {
  return mbind(binomial(p.i, 1.0 - std::exp(-gamma_rate)),
               [p](std::int64_t dir) {
                 return Model<PoplV>::pure(PoplV{p.s, p.i - dir, p.r + dir, p.v});
               });
}

Model<PoplV> trans_rs_v(double eta, PoplV p) {
  return mbind(binomial(p.r, 1.0 - std::exp(-eta)), [p](std::int64_t drs) {
    return Model<PoplV>::pure(PoplV{p.s + drs, p.i, p.r - drs, p.v});
  });
}
}  // namespace

Model<PoplV> trans_sv(double omega, PoplV p) {
  return mbind(binomial(p.s, 1.0 - std::exp(-omega)), [p](std::int64_t dsv) {
    return Model<PoplV>::pure(PoplV{p.s - dsv, p.i, p.r, p.v + dsv});
  });
}

Model<PoplV> trans_sir_rsv(SirVTransParams tp, PoplV p) {
  auto si = [beta = tp.beta](PoplV q) { return trans_si_v(beta, q); };
  auto ir = [gamma_rate = tp.gamma](PoplV q) { return trans_ir_v(gamma_rate, q); };
  auto rs = [eta = tp.eta](PoplV q) { return trans_rs_v(eta, q); };
  auto sv = [omega = tp.omega](PoplV q) { return trans_sv(omega, q); };
  return kleisli(kleisli(kleisli(si, ir), rs), sv)(p);
}

Model<SirVTransParams> trans_prior_sir_rsv() {
  return mbind(gamma(2, 1, ObsVar("beta")), [](double beta) {
    return mbind(gamma(1, 0.125, ObsVar("gamma")), [beta](double gamma_rate) {
      return mbind(gamma(1, 0.125, ObsVar("eta")), [beta, gamma_rate](double eta) {
        return mbind(gamma(1, 0.125, ObsVar("omega")),
                     [beta, gamma_rate, eta](double omega) {
                       return Model<SirVTransParams>::pure(
                           SirVTransParams{beta, gamma_rate, eta, omega});
                     });
      });
    });
  });
}

Model<PoplV> hmm_sir_rsv(std::size_t days, PoplV sir0) {
  auto obs = [](double rho, PoplV p) {
    return poisson(rho * static_cast<double>(p.i), ObsVar("xi"));
  };
  return hmm(
      trans_prior_sir_rsv(), obs_prior_sir(),
      [](SirVTransParams tp, PoplV p) { return trans_sir_rsv(tp, p); }, obs,
      days, sir0);
}

// --------------------------------------------------------------------------
// LDA

Model<std::vector<std::string>> lda(std::vector<std::string> vocab,
                                    std::size_t n_topics, std::size_t doc_len) {
  if (vocab.empty()) throw model_error("lda: vocabulary must be non-empty");
  if (n_topics == 0) throw model_error("lda: need at least one topic");
  auto vocab_p = std::make_shared<const std::vector<std::string>>(std::move(vocab));

  // phi_k ~ Dirichlet(1^V), one hit of tag "phi" per topic.
  auto topic_word_dists = traverse_model(
      std::vector<std::size_t>(n_topics, vocab_p->size()), [](std::size_t v) {
        return dirichlet(std::vector<double>(v, 1.0), ObsVar("phi"));
      });

  return mbind(
      dirichlet(std::vector<double>(n_topics, 1.0), ObsVar("theta")),
      [vocab_p, doc_len, topic_word_dists](std::vector<double> theta) {
        return mbind(topic_word_dists, [vocab_p, doc_len, theta](
                                           std::vector<std::vector<double>> phi) {
          std::vector<std::pair<PrimVal, double>> topic_items;
          for (std::size_t k = 0; k < theta.size(); ++k)
            topic_items.emplace_back(static_cast<std::int64_t>(k), theta[k]);
          auto word = [vocab_p, topic_items, phi](std::size_t) {
            return mbind(discrete(topic_items), [vocab_p, phi](PrimVal z) {
              const auto& weights = phi[static_cast<std::size_t>(as_int(z))];
              std::vector<std::pair<PrimVal, double>> word_items;
              for (std::size_t j = 0; j < weights.size(); ++j)
                word_items.emplace_back(static_cast<std::int64_t>(j), weights[j]);
              return mbind(discrete(word_items, ObsVar("w")),
                           [vocab_p](PrimVal w) {
                             return Model<std::string>::pure(
                                 (*vocab_p)[static_cast<std::size_t>(as_int(w))]);
                           });
            });
          };
          std::vector<std::size_t> positions(doc_len);
          for (std::size_t i = 0; i < doc_len; ++i) positions[i] = i;
          return traverse_model(positions, word);
        });
      });
}

}  // namespace probeff::zoo
