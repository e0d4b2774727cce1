#pragma once

#include <functional>
#include <memory>
#include <type_traits>
#include <utility>
#include <variant>

#include "probeff/effect_ops.hpp"
#include "probeff/errors.hpp"

namespace probeff {

// A pending operation inside a program tree: which effect of the ordered
// signature it belongs to (by position), plus the operation value itself.
class EffectRequest {
 public:
  EffectRequest(std::size_t index, OpPayload payload)
      : index_(index), payload_(std::move(payload)) {}

  std::size_t effect_index() const { return index_; }
  EffectId effect() const { return effect_id_of(payload_); }
  const OpPayload& payload() const { return payload_; }

  EffectRequest reindexed(std::size_t index) const {
    return EffectRequest(index, payload_);
  }

 private:
  std::size_t index_;
  OpPayload payload_;
};

// Membership is resolved when a request is constructed against a concrete
// signature; a miss is a hard error, never a silent wrong index.
inline EffectRequest inject(OpPayload op, const EffectSignature& sig) {
  const EffectId id = effect_id_of(op);
  if (auto idx = sig.find(id)) return EffectRequest(*idx, std::move(op));
  throw internal_error("inject: effect " + effect_id_name(id) +
                       " is not a member of the signature");
}

// Some(payload) iff the request belongs to the target effect.
inline const OpPayload* project(const EffectRequest& req, const EffectId& target) {
  if (req.effect() == target) return &req.payload();
  return nullptr;
}

inline const SampleOp* project_sample(const EffectRequest& req) {
  if (const auto* p = project(req, sample_effect())) return &std::get<SampleOp>(*p);
  return nullptr;
}

inline const ObserveOp* project_observe(const EffectRequest& req) {
  if (const auto* p = project(req, observe_effect())) return &std::get<ObserveOp>(*p);
  return nullptr;
}

// Split a request over signature (E : Rest): the operation itself when it
// belongs to the head effect E, otherwise the same request reindexed into
// Rest. The payload is never lost.
using Discharge = std::variant<EffectRequest, OpPayload>;

inline Discharge discharge(const EffectRequest& req, const EffectId& head) {
  if (req.effect_index() == 0) {
    if (!(req.effect() == head))
      throw internal_error("discharge: head effect is " +
                           effect_id_name(req.effect()) + ", handler expected " +
                           effect_id_name(head) + " (stack misassembled)");
    return req.payload();
  }
  return req.reindexed(req.effect_index() - 1);
}

// ---------------------------------------------------------------------------
// Program trees: a leaf holds a pure result, a node holds a pending request
// plus a continuation from the request's (dynamically tagged) result to the
// rest of the tree. Values are immutable; the continuation is single-shot:
// every handler in this library invokes it at most once per traversal.
template <typename A>
class Prog {
 public:
  using value_type = A;
  using Cont = std::function<Prog<A>(Boxed)>;

  struct Node {
    EffectRequest req;
    Cont k;
  };

  static Prog pure(A value) { return Prog(Leaf{std::move(value)}); }

  static Prog op(EffectRequest req, Cont k) {
    return Prog(std::make_shared<const Node>(Node{std::move(req), std::move(k)}));
  }

  bool is_pure() const { return std::holds_alternative<Leaf>(rep_); }

  const A& value() const& { return std::get<Leaf>(rep_).value; }
  A take_value() && { return std::move(std::get<Leaf>(rep_).value); }

  const std::shared_ptr<const Node>& node() const {
    return std::get<std::shared_ptr<const Node>>(rep_);
  }

  const EffectRequest& request() const { return node()->req; }

  Prog resume(Boxed v) const { return node()->k(std::move(v)); }

 private:
  struct Leaf {
    A value;
  };

  explicit Prog(Leaf leaf) : rep_(std::move(leaf)) {}
  explicit Prog(std::shared_ptr<const Node> n) : rep_(std::move(n)) {}

  std::variant<Leaf, std::shared_ptr<const Node>> rep_;
};

// Sequencing: grafts f onto every leaf of p.
template <typename A, typename F>
auto bind(Prog<A> p, F f) -> std::invoke_result_t<F, A> {
  using PB = std::invoke_result_t<F, A>;
  if (p.is_pure()) return f(std::move(p).take_value());
  auto n = p.node();
  return PB::op(n->req, [n, f = std::move(f)](Boxed v) {
    return bind(n->k(std::move(v)), f);
  });
}

// A one-node tree performing a single operation: Node(inject(op), Leaf).
template <typename Op>
Prog<typename Op::result> call(const EffectSignature& sig, Op op) {
  using R = typename Op::result;
  return Prog<R>::op(inject(OpPayload(std::move(op)), sig),
                     [](Boxed v) { return Prog<R>::pure(unbox<R>(std::move(v))); });
}

}  // namespace probeff
