#pragma once

#include <utility>
#include <vector>

#include "probeff/prog.hpp"

namespace probeff {

// List monoid; the only Writer instance the library itself needs. Other
// monoids can hook in through ADL overloads of mappend.
template <typename T>
std::vector<T> mappend(std::vector<T> a, std::vector<T> b) {
  a.insert(a.end(), std::make_move_iterator(b.begin()),
           std::make_move_iterator(b.end()));
  return a;
}

// Threads a state value through Modify requests in program order; the final
// state is returned paired with the program's result. Expects State<S> at
// the head of the signature; all other requests are forwarded untouched.
template <typename S, typename A>
Prog<std::pair<A, S>> handle_state(S state, Prog<A> p) {
  using Out = Prog<std::pair<A, S>>;
  for (;;) {
    if (p.is_pure())
      return Out::pure({std::move(p).take_value(), std::move(state)});
    auto n = p.node();
    Discharge d = discharge(n->req, state_effect<S>());
    if (auto* own = std::get_if<OpPayload>(&d)) {
      auto& m = std::get<ModifyOp>(*own);
      state = std::any_cast<S>(m.update(std::any(std::move(state))));
      p = n->k(Boxed(Unit{}));
      continue;
    }
    auto fwd = std::get<EffectRequest>(std::move(d));
    return Out::op(std::move(fwd),
                   [state = std::move(state), n](Boxed v) mutable {
                     return handle_state<S, A>(std::move(state), n->k(std::move(v)));
                   });
  }
}

// Collects told chunks by in-order monoid combine, starting from the
// identity. Expects Writer<W> at the head of the signature.
template <typename W, typename A>
Prog<std::pair<A, W>> handle_writer(Prog<A> p, W acc = W{}) {
  using Out = Prog<std::pair<A, W>>;
  for (;;) {
    if (p.is_pure())
      return Out::pure({std::move(p).take_value(), std::move(acc)});
    auto n = p.node();
    Discharge d = discharge(n->req, writer_effect<W>());
    if (auto* own = std::get_if<OpPayload>(&d)) {
      auto& t = std::get<TellOp>(*own);
      acc = mappend(std::move(acc), std::any_cast<W>(std::move(t.chunk)));
      p = n->k(Boxed(Unit{}));
      continue;
    }
    auto fwd = std::get<EffectRequest>(std::move(d));
    return Out::op(std::move(fwd), [acc = std::move(acc), n](Boxed v) mutable {
      return handle_writer<W, A>(n->k(std::move(v)), std::move(acc));
    });
  }
}

}  // namespace probeff
