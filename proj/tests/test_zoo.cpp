#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "probeff/inference.hpp"
#include "probeff/zoo.hpp"

using namespace probeff;
using zoo::Popl;
using zoo::PoplV;

namespace {

const EffectSignature kCoreSig{obs_reader_effect(), dist_effect(),
                               observe_effect(), sample_effect()};

template <typename A>
std::vector<std::string> specialised_lines(const Model<A>& m, const Env& env,
                                           std::uint64_t seed) {
  RandomSource rng(seed);
  std::vector<std::string> lines;
  (void)drive_specialised(handle_core(kCoreSig, env, m), rng, &lines);
  return lines;
}

Env hmm_env(std::vector<PrimVal> y) {
  return Env::nil()
      .cons(ObsVar("y"), Kind::Int, std::move(y))
      .cons(ObsVar("dy"), Kind::Real, {PrimVal(0.8)})
      .cons(ObsVar("dx"), Kind::Real, {PrimVal(0.5)});
}

Env sir_env() {
  return Env::nil()
      .cons(ObsVar("xi"), Kind::Int, {})
      .cons(ObsVar("rho"), Kind::Real, {PrimVal(0.25)})
      .cons(ObsVar("gamma"), Kind::Real, {PrimVal(0.05)})
      .cons(ObsVar("beta"), Kind::Real, {PrimVal(0.6)});
}

}  // namespace

TEST_CASE("linRegr: fully observed model returns the observed output") {
  Env env = Env::nil()
                .cons(ObsVar("y"), Kind::Real, {PrimVal(7.25)})
                .cons(ObsVar("sigma"), Kind::Real, {PrimVal(1.0)})
                .cons(ObsVar("c"), Kind::Real, {PrimVal(0.0)})
                .cons(ObsVar("mu"), Kind::Real, {PrimVal(3.0)});
  RandomSource rng(1);
  auto run = run_simulate(env, zoo::lin_regr(2.0), rng);
  CHECK(run.value == 7.25);
  CHECK(run.strace.empty());
}

TEST_CASE("coinFlip: observing p = 1 forces heads") {
  Env env = Env::nil()
                .cons(ObsVar("y"), Kind::Bool, {})
                .cons(ObsVar("p"), Kind::Real, {PrimVal(1.0)});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource rng(seed);
    CHECK(run_simulate(env, zoo::coin_flip(), rng).value == true);
  }
}

TEST_CASE("hmm with zero nodes returns x0 and only the priors") {
  auto lines = specialised_lines(zoo::hmm_discrete(0, 4), hmm_env({}), 2);
  CHECK(lines.size() == 2);  // dx and dy only
  RandomSource rng(2);
  CHECK(drive_specialised(
            handle_core(kCoreSig, hmm_env({}), zoo::hmm_discrete(0, 4)), rng)
            .first == 4);
}

TEST_CASE("discrete hmm latent state is bounded by the chain length") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource rng(seed);
    const auto x10 =
        run_simulate(hmm_env({}), zoo::hmm_discrete(10, 0), rng).value;
    CHECK(x10 >= 0);
    CHECK(x10 <= 10);
  }
}

TEST_CASE("conditioning the hmm consumes exactly the ten observations") {
  std::vector<PrimVal> ys;
  for (std::int64_t v : {0, 1, 1, 3, 4, 5, 5, 5, 6, 5}) ys.push_back(v);
  Env env = Env::nil()
                .cons(ObsVar("y"), Kind::Int, std::move(ys))
                .cons(ObsVar("dy"), Kind::Real, {})
                .cons(ObsVar("dx"), Kind::Real, {});
  RandomSource rng(3);
  auto run = run_simulate(env, zoo::hmm_discrete(10, 0), rng);
  CHECK(run.residual.get("y").empty());         // all ten consumed
  CHECK(run.strace.count(Addr{"dx", 0}) == 1);  // dx, dy sampled instead
  std::size_t y_samples = 0;
  for (const auto& [addr, v] : run.strace)
    if (addr.tag == "y") ++y_samples;
  CHECK(y_samples == 0);
}

TEST_CASE("monolithic and modular hmm specialise to identical trees") {
  for (std::uint64_t seed : {1, 2, 3}) {
    CHECK(specialised_lines(zoo::hmm_discrete(4, 0), hmm_env({}), seed) ==
          specialised_lines(zoo::hmm_discrete_monolithic(4, 0), hmm_env({}), seed));
    Env open = Env::nil()
                   .cons(ObsVar("y"), Kind::Int, {})
                   .cons(ObsVar("dy"), Kind::Real, {})
                   .cons(ObsVar("dx"), Kind::Real, {});
    CHECK(specialised_lines(zoo::hmm_discrete(4, 0), open, seed) ==
          specialised_lines(zoo::hmm_discrete_monolithic(4, 0), open, seed));
  }
}

TEST_CASE("transSI with beta = 0 never infects") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource rng(seed);
    auto out =
        run_simulate(Env::nil(), zoo::trans_si(0.0, Popl{700, 50, 10}), rng);
    CHECK(out.value == Popl{700, 50, 10});
  }
}

TEST_CASE("an empty infected group stays quiet") {
  RandomSource rng(4);
  auto out = run_simulate(sir_env(), zoo::hmm_sir(3, Popl{500, 0, 0}), rng);
  CHECK(out.value == Popl{500, 0, 0});
  std::size_t xi_count = 0;
  for (const auto& [addr, v] : out.strace)
    if (addr.tag == "xi") {
      CHECK(as_int(v) == 0);  // Poisson at rate 0
      ++xi_count;
    }
  CHECK(xi_count == 3);
}

TEST_CASE("infection counts match the binomial mean") {
  // E[dsi] for (s=762, i=1, beta=0.7) = 762 * (1 - exp(-0.7/763))
  const double p_infect = 1.0 - std::exp(-0.7 * 1.0 / 763.0);
  const double mean = 762.0 * p_infect;
  const double var = 762.0 * p_infect * (1 - p_infect);
  const int n = 10000;
  RandomSource rng(5);
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    auto out =
        run_simulate(Env::nil(), zoo::trans_si(0.7, Popl{762, 1, 0}), rng);
    sum += static_cast<double>(out.value.i - 1);
  }
  const double se = std::sqrt(var / n);
  CHECK(std::abs(sum / n - mean) <= 4 * se);
}

TEST_CASE("population is conserved by every transition sub-model") {
  RandomSource seeds(6);
  for (int trial = 0; trial < 200; ++trial) {
    const Popl p{static_cast<std::int64_t>(seeds.uniform_index(1000)),
                 static_cast<std::int64_t>(seeds.uniform_index(1000)),
                 static_cast<std::int64_t>(seeds.uniform_index(1000))};
    const double beta = 3.0 * seeds.uniform01();
    const double gamma_rate = 2.0 * seeds.uniform01();
    const double eta = 2.0 * seeds.uniform01();
    const std::int64_t total = p.s + p.i + p.r;

    RandomSource rng(trial);
    auto base = run_simulate(
        Env::nil(), zoo::trans_sir(zoo::SirTransParams{beta, gamma_rate}, p),
        rng);
    CHECK(base.value.s + base.value.i + base.value.r == total);
    CHECK(base.value.s >= 0);
    CHECK(base.value.i >= 0);
    CHECK(base.value.r >= 0);

    auto rs = run_simulate(
        Env::nil(),
        zoo::trans_sir_rs(zoo::SirRsTransParams{beta, gamma_rate, eta}, p), rng);
    CHECK(rs.value.s + rs.value.i + rs.value.r == total);

    const PoplV pv{p.s, p.i, p.r,
                   static_cast<std::int64_t>(seeds.uniform_index(500))};
    const double omega = seeds.uniform01();
    auto rsv = run_simulate(
        Env::nil(),
        zoo::trans_sir_rsv(zoo::SirVTransParams{beta, gamma_rate, eta, omega},
                           pv),
        rng);
    CHECK(rsv.value.s + rsv.value.i + rsv.value.r + rsv.value.v ==
          pv.s + pv.i + pv.r + pv.v);
  }
}

TEST_CASE("resusceptibility extension leaves observation subtrees bit-identical") {
  // eta observed as 0 disables the new transition; the observation model
  // must then be untouched node for node, including sampled reports.
  Env base = sir_env();
  Env with_rs = Env::nil()
                    .cons(ObsVar("xi"), Kind::Int, {})
                    .cons(ObsVar("rho"), Kind::Real, {PrimVal(0.25)})
                    .cons(ObsVar("eta"), Kind::Real, {PrimVal(0.0)})
                    .cons(ObsVar("gamma"), Kind::Real, {PrimVal(0.05)})
                    .cons(ObsVar("beta"), Kind::Real, {PrimVal(0.6)});
  for (std::uint64_t seed : {1, 2, 3}) {
    auto base_lines =
        specialised_lines(zoo::hmm_sir(20, Popl{762, 1, 0}), base, seed);
    auto rs_lines =
        specialised_lines(zoo::hmm_sir_rs(20, Popl{762, 1, 0}), with_rs, seed);
    auto only_xi = [](const std::vector<std::string>& lines) {
      std::vector<std::string> out;
      for (const auto& l : lines)
        if (l.rfind("xi#", 0) == 0) out.push_back(l);
      return out;
    };
    CHECK(only_xi(base_lines) == only_xi(rs_lines));
    // and the transition side did change: one extra node per day + eta prior
    CHECK(rs_lines.size() == base_lines.size() + 20 + 1);
  }
}

TEST_CASE("writer instrumentation returns one population per step") {
  RandomSource rng(7);
  auto out =
      run_simulate(sir_env(), zoo::hmm_sir_traced(5, Popl{762, 1, 0}), rng);
  const auto& [final_popl, trajectory] = out.value;
  REQUIRE(trajectory.size() == 5);
  CHECK(trajectory.back() == final_popl);
  for (const auto& p : trajectory) CHECK(p.s + p.i + p.r == 763);
}

TEST_CASE("lda with one topic draws words from that topic's distribution") {
  Env env = Env::nil()
                .cons(ObsVar("w"), Kind::Int, {})
                .cons(ObsVar("phi"), Kind::Vec,
                      {PrimVal(std::vector<double>{0.1, 0.2, 0.7})})
                .cons(ObsVar("theta"), Kind::Vec, {});
  const std::size_t doc_len = 3000;
  RandomSource rng(8);
  auto out = run_simulate(env, zoo::lda({"a", "b", "c"}, 1, doc_len), rng);
  REQUIRE(out.value.size() == doc_len);
  std::map<std::string, double> freq;
  for (const auto& w : out.value) freq[w] += 1.0 / doc_len;
  const std::map<std::string, double> expected{
      {"a", 0.1}, {"b", 0.2}, {"c", 0.7}};
  for (const auto& [word, p] : expected) {
    const double se = std::sqrt(p * (1 - p) / doc_len);
    CHECK(std::abs(freq[word] - p) <= 4 * se);
  }
}

TEST_CASE("lda with all mass on one word is deterministic") {
  Env env = Env::nil()
                .cons(ObsVar("w"), Kind::Int, {})
                .cons(ObsVar("phi"), Kind::Vec,
                      {PrimVal(std::vector<double>{0.0, 1.0, 0.0}),
                       PrimVal(std::vector<double>{0.0, 1.0, 0.0})})
                .cons(ObsVar("theta"), Kind::Vec, {});
  RandomSource rng(9);
  auto out = run_simulate(env, zoo::lda({"a", "b", "c"}, 2, 50), rng);
  REQUIRE(out.value.size() == 50);
  for (const auto& w : out.value) CHECK(w == "b");
}

TEST_CASE("lda topic and word distributions are simplex draws") {
  Env env = Env::nil()
                .cons(ObsVar("w"), Kind::Int, {})
                .cons(ObsVar("phi"), Kind::Vec, {})
                .cons(ObsVar("theta"), Kind::Vec, {});
  RandomSource rng(10);
  auto out = run_simulate(env, zoo::lda({"a", "b", "c", "d"}, 3, 10), rng);
  std::size_t vec_draws = 0;
  for (const auto& [addr, v] : out.strace) {
    if (kind_of(v) != Kind::Vec) continue;
    ++vec_draws;
    double total = 0;
    for (double x : as_vec(v)) {
      CHECK(x >= 0.0);
      total += x;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
  CHECK(vec_draws == 4);  // theta + three phi rows
}
