#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "probeff/builtin_effects.hpp"
#include "probeff/prog.hpp"
#include "probeff/rng.hpp"

using namespace probeff;

namespace {

// A three-effect signature used throughout: [ObsReader, Dist, Sample].
EffectSignature sig3() {
  return {obs_reader_effect(), dist_effect(), sample_effect()};
}

OpPayload ask_op(const std::string& name) { return AskOp{name}; }

OpPayload dist_op() {
  return DistOp{Dist(NormalF{0.0, 1.0})};
}

OpPayload sample_op() {
  return SampleOp{Dist(NormalF{0.0, 1.0}), Addr{"x", 0}};
}

// Counts requests per effect while feeding fixed values to continuations.
// The independent "counting handler" oracle used by structural tests.
template <typename A>
std::pair<A, std::vector<EffectId>> drive_counting(Prog<A> p, double feed = 0.25) {
  std::vector<EffectId> seen;
  while (!p.is_pure()) {
    const EffectRequest& req = p.request();
    seen.push_back(req.effect());
    Boxed v;
    switch (req.effect().kind) {
      case EffectKind::ObsReader: v = std::optional<PrimVal>{}; break;
      case EffectKind::State:
      case EffectKind::Writer: v = Unit{}; break;
      default: v = PrimVal(feed); break;
    }
    p = p.resume(std::move(v));
  }
  return {std::move(p).take_value(), std::move(seen)};
}

}  // namespace

TEST_CASE("inject places operations at the owning effect's index") {
  const auto sig = sig3();
  CHECK(inject(ask_op("p"), sig).effect_index() == 0);
  CHECK(inject(dist_op(), sig).effect_index() == 1);
  CHECK(inject(sample_op(), sig).effect_index() == 2);
}

TEST_CASE("inject rejects a non-member effect") {
  EffectSignature no_sample{obs_reader_effect(), dist_effect()};
  CHECK_THROWS_AS(inject(sample_op(), no_sample), internal_error);
}

TEST_CASE("signatures reject duplicate effects") {
  CHECK_THROWS_AS(EffectSignature({dist_effect(), dist_effect()}),
                  internal_error);
  // State instantiated at different types is two distinct effects.
  CHECK_NOTHROW(EffectSignature({state_effect<int>(), state_effect<double>()}));
  CHECK_THROWS_AS(EffectSignature({state_effect<int>(), state_effect<int>()}),
                  internal_error);
}

TEST_CASE("project round-trips an injected operation") {
  const auto sig = sig3();
  auto req = inject(ask_op("p"), sig);
  const OpPayload* p = project(req, obs_reader_effect());
  REQUIRE(p != nullptr);
  CHECK(std::get<AskOp>(*p).name == "p");
  CHECK(project(req, dist_effect()) == nullptr);
}

TEST_CASE("exactly one effect in the signature projects Some") {
  const auto sig = sig3();
  const OpPayload ops[] = {ask_op("p"), dist_op(), sample_op()};
  for (const auto& op : ops) {
    auto req = inject(op, sig);
    int hits = 0;
    for (std::size_t i = 0; i < sig.size(); ++i)
      if (project(req, sig.at(i))) ++hits;
    CHECK(hits == 1);
  }
}

TEST_CASE("discharge partitions head vs rest and loses no payload") {
  const auto sig = sig3();

  auto head = discharge(inject(ask_op("p"), sig), obs_reader_effect());
  REQUIRE(std::holds_alternative<OpPayload>(head));
  CHECK(std::get<AskOp>(std::get<OpPayload>(head)).name == "p");

  auto fwd = discharge(inject(dist_op(), sig), obs_reader_effect());
  REQUIRE(std::holds_alternative<EffectRequest>(fwd));
  const auto& req = std::get<EffectRequest>(fwd);
  CHECK(req.effect_index() == 0);  // reindexed into [Dist, Sample]
  CHECK(req.effect() == dist_effect());

  // Exactly one of the two alternatives holds for every effect in (E : Rest).
  for (const auto& op : {ask_op("q"), dist_op(), sample_op()}) {
    auto d = discharge(inject(op, sig), obs_reader_effect());
    const bool own = std::holds_alternative<OpPayload>(d);
    CHECK(own == (effect_id_of(op) == obs_reader_effect()));
  }
}

TEST_CASE("discharge then reinject into the rest signature is the identity") {
  const auto sig = sig3();
  EffectSignature rest{dist_effect(), sample_effect()};
  for (const auto& op : {dist_op(), sample_op()}) {
    auto d = discharge(inject(op, sig), obs_reader_effect());
    const auto& req = std::get<EffectRequest>(d);
    auto direct = inject(op, rest);
    CHECK(req.effect_index() == direct.effect_index());
    CHECK(req.effect() == direct.effect());
  }
}

TEST_CASE("discharge refuses a mismatched head (stack misassembly)") {
  const auto sig = sig3();
  auto req = inject(ask_op("p"), sig);  // index 0, ObsReader
  CHECK_THROWS_AS(discharge(req, dist_effect()), internal_error);
}

TEST_CASE("call produces a single-node tree") {
  const auto sig = sig3();
  auto p = call(sig, AskOp{"p"});
  REQUIRE(!p.is_pure());
  auto rest = p.resume(Boxed(std::optional<PrimVal>(PrimVal(0.5))));
  REQUIRE(rest.is_pure());
  REQUIRE(rest.value().has_value());
  CHECK(as_real(*rest.value()) == 0.5);
}

TEST_CASE("call result tag mismatch is a fatal internal error") {
  const auto sig = sig3();
  auto p = call(sig, AskOp{"p"});
  CHECK_THROWS_AS(p.resume(Boxed(PrimVal(0.5))), internal_error);
}

TEST_CASE("bind: left and right identity") {
  const auto sig = sig3();

  // bind(Leaf(3), f) == f(3)
  auto lhs = bind(Prog<int>::pure(3),
                  [](int x) { return Prog<int>::pure(x + 1); });
  REQUIRE(lhs.is_pure());
  CHECK(lhs.value() == 4);

  // bind(call(op), pure) behaves as call(op)
  auto p = bind(call(sig, SampleOp{Dist(NormalF{0, 1}), Addr{"x", 0}}),
                [](PrimVal v) { return Prog<PrimVal>::pure(std::move(v)); });
  auto [value, seen] = drive_counting(std::move(p), 0.75);
  CHECK(seen.size() == 1);
  CHECK(as_real(value) == 0.75);
}

TEST_CASE("bind adds the bound program's nodes after the first") {
  const auto sig = sig3();
  auto two = bind(call(sig, SampleOp{Dist(NormalF{0, 1}), Addr{"x", 0}}),
                  [](PrimVal) { return call(sig3(), AskOp{"p"}); });
  auto [value, seen] = drive_counting(std::move(two));
  CHECK(seen.size() == 2);
  CHECK(seen[0] == sample_effect());
  CHECK(seen[1] == obs_reader_effect());
  (void)value;
}

TEST_CASE("bind associativity observed under a handler stack") {
  // Random 10-node trees: chains of State<int> modifications with random
  // increments; both associations must drive to identical results.
  RandomSource rng(7);
  EffectSignature sig{state_effect<int>(), obs_reader_effect(), dist_effect()};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> increments;
    for (int i = 0; i < 10; ++i)
      increments.push_back(static_cast<int>(rng.uniform_index(100)));

    auto step = [&sig](int d) {
      return call(sig, make_modify<int>([d](int s) { return s + d; }));
    };
    auto chain_left = Prog<Unit>::pure(Unit{});
    // ((p >>= f1) >>= f2) ...
    for (int d : increments)
      chain_left = bind(std::move(chain_left),
                        [&step, d](Unit) { return step(d); });
    // p >>= (x -> f1 >>= f2 ...)
    std::function<Prog<Unit>(std::size_t)> chain_right_from =
        [&](std::size_t i) -> Prog<Unit> {
      if (i == increments.size()) return Prog<Unit>::pure(Unit{});
      return bind(step(increments[i]),
                  [&, i](Unit) { return chain_right_from(i + 1); });
    };

    auto run = [](Prog<Unit> p) {
      auto handled = handle_state(0, std::move(p));
      REQUIRE(handled.is_pure());
      return handled.value().second;
    };
    const int expected = [&] {
      int s = 0;
      for (int d : increments) s += d;
      return s;
    }();
    CHECK(run(std::move(chain_left)) == expected);
    CHECK(run(chain_right_from(0)) == expected);
  }
}

TEST_CASE("a handler for an absent effect is the identity up to re-wrapping") {
  EffectSignature sig{state_effect<int>(), obs_reader_effect(), dist_effect(),
                      sample_effect()};
  // No State<int> requests anywhere in this program.
  auto p = bind(call(sig, AskOp{"p"}), [sig](std::optional<PrimVal>) {
    return call(sig, SampleOp{Dist(NormalF{0, 1}), Addr{"x", 0}});
  });
  auto handled = handle_state(41, std::move(p));
  auto [result, seen] = drive_counting(std::move(handled), 0.5);
  CHECK(result.second == 41);          // state unchanged
  CHECK(as_real(result.first) == 0.5); // program result unchanged
  REQUIRE(seen.size() == 2);           // both foreign requests forwarded
  CHECK(seen[0] == obs_reader_effect());
  CHECK(seen[1] == sample_effect());
}
