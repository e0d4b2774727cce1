#pragma once

#include <any>
#include <compare>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <typeindex>
#include <variant>
#include <vector>

#include "probeff/dist.hpp"
#include "probeff/primval.hpp"

namespace probeff {

struct Unit {
  friend bool operator==(Unit, Unit) { return true; }
};

// Runtime address of a probabilistic operation: the observable-variable name
// when the distribution carries one (otherwise a family-derived label), plus
// the per-tag occurrence count within one execution. Stable across repeated
// runs of the same model, which is what lets MH reuse old samples.
struct Addr {
  std::string tag;
  std::int64_t occurrence = 0;

  friend auto operator<=>(const Addr&, const Addr&) = default;
};

std::string addr_to_string(const Addr& a);  // "tag#occurrence"

// ---------------------------------------------------------------------------
// Operation payloads, one struct per effect operation. `result` names the
// semantic type a handler must feed back into the continuation.

struct AskOp {
  std::string name;
  using result = std::optional<PrimVal>;
};

struct DistOp {
  Dist dist;
  using result = PrimVal;
};

struct SampleOp {
  Dist dist;
  Addr addr;
  using result = PrimVal;
};

struct ObserveOp {
  Dist dist;
  PrimVal value;
  Addr addr;
  using result = PrimVal;
};

// State<S>, type-erased over S. The update must be pure.
struct ModifyOp {
  std::type_index state_type;
  std::function<std::any(std::any&&)> update;
  using result = Unit;
};

// Writer<W>, type-erased over W.
struct TellOp {
  std::type_index chunk_type;
  std::any chunk;
  using result = Unit;
};

using OpPayload = std::variant<AskOp, DistOp, SampleOp, ObserveOp, ModifyOp, TellOp>;

// The dynamic value a handler passes into a continuation. Each smart
// constructor re-tags it to its declared semantic type; a tag mismatch is an
// internal-consistency error.
using Boxed = std::variant<Unit, PrimVal, std::optional<PrimVal>>;

template <typename T>
T unbox(Boxed&& b) {
  if (auto* p = std::get_if<T>(&b)) return std::move(*p);
  throw internal_error("operation result tag mismatch at a node boundary");
}

// ---------------------------------------------------------------------------
// Effect identities and ordered signatures.

enum class EffectKind { ObsReader, Dist, Sample, Observe, State, Writer };

const char* effect_kind_name(EffectKind k);

struct EffectId {
  EffectKind kind;
  std::type_index payload_type;  // typeid(void) except for State/Writer

  friend bool operator==(const EffectId& a, const EffectId& b) {
    return a.kind == b.kind && a.payload_type == b.payload_type;
  }
};

std::string effect_id_name(const EffectId& id);

inline EffectId obs_reader_effect() { return {EffectKind::ObsReader, typeid(void)}; }
inline EffectId dist_effect() { return {EffectKind::Dist, typeid(void)}; }
inline EffectId sample_effect() { return {EffectKind::Sample, typeid(void)}; }
inline EffectId observe_effect() { return {EffectKind::Observe, typeid(void)}; }

template <typename S>
EffectId state_effect() {
  return {EffectKind::State, typeid(S)};
}
template <typename W>
EffectId writer_effect() {
  return {EffectKind::Writer, typeid(W)};
}

EffectId effect_id_of(const OpPayload& op);

// Ordered list of effect identifiers. Duplicates are rejected: they would
// make projection ambiguous.
class EffectSignature {
 public:
  EffectSignature(std::initializer_list<EffectId> ids);
  explicit EffectSignature(std::vector<EffectId> ids);

  std::size_t size() const { return ids_->size(); }
  const EffectId& at(std::size_t i) const { return (*ids_)[i]; }
  std::optional<std::size_t> find(const EffectId& id) const;

  EffectSignature tail() const;                    // drop the head effect
  EffectSignature with_head(const EffectId& id) const;  // prepend

 private:
  std::shared_ptr<const std::vector<EffectId>> ids_;
};

// Helper for building State modifications without spelling the erasure.
template <typename S, typename F>
ModifyOp make_modify(F f) {
  return ModifyOp{typeid(S), [f = std::move(f)](std::any&& a) -> std::any {
                    return std::any(f(std::any_cast<S>(std::move(a))));
                  }};
}

template <typename W>
TellOp make_tell(W chunk) {
  return TellOp{typeid(W), std::any(std::move(chunk))};
}

}  // namespace probeff
