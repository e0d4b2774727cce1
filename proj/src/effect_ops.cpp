#include "probeff/effect_ops.hpp"

#include <algorithm>

#include "probeff/errors.hpp"

namespace probeff {

std::string addr_to_string(const Addr& a) {
  return a.tag + "#" + std::to_string(a.occurrence);
}

const char* effect_kind_name(EffectKind k) {
  switch (k) {
    case EffectKind::ObsReader: return "ObsReader";
    case EffectKind::Dist: return "Dist";
    case EffectKind::Sample: return "Sample";
    case EffectKind::Observe: return "Observe";
    case EffectKind::State: return "State";
    case EffectKind::Writer: return "Writer";
  }
  return "?";
}

std::string effect_id_name(const EffectId& id) {
  std::string out = effect_kind_name(id.kind);
  if (id.kind == EffectKind::State || id.kind == EffectKind::Writer)
    out += std::string("<") + id.payload_type.name() + ">";
  return out;
}

EffectId effect_id_of(const OpPayload& op) {
  return std::visit(
      [](const auto& o) -> EffectId {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, AskOp>) return obs_reader_effect();
        else if constexpr (std::is_same_v<T, DistOp>) return dist_effect();
        else if constexpr (std::is_same_v<T, SampleOp>) return sample_effect();
        else if constexpr (std::is_same_v<T, ObserveOp>) return observe_effect();
        else if constexpr (std::is_same_v<T, ModifyOp>)
          return EffectId{EffectKind::State, o.state_type};
        else
          return EffectId{EffectKind::Writer, o.chunk_type};
      },
      op);
}

namespace {
std::shared_ptr<const std::vector<EffectId>> checked(std::vector<EffectId> ids) {
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j)
      if (ids[i] == ids[j])
        throw internal_error("duplicate effect " + effect_id_name(ids[i]) +
                             " in signature");
  return std::make_shared<const std::vector<EffectId>>(std::move(ids));
}
}  // namespace

EffectSignature::EffectSignature(std::initializer_list<EffectId> ids)
    : ids_(checked(std::vector<EffectId>(ids))) {}

EffectSignature::EffectSignature(std::vector<EffectId> ids)
    : ids_(checked(std::move(ids))) {}

std::optional<std::size_t> EffectSignature::find(const EffectId& id) const {
  for (std::size_t i = 0; i < ids_->size(); ++i)
    if ((*ids_)[i] == id) return i;
  return std::nullopt;
}

EffectSignature EffectSignature::tail() const {
  if (ids_->empty()) throw internal_error("tail of an empty effect signature");
  return EffectSignature(std::vector<EffectId>(ids_->begin() + 1, ids_->end()));
}

EffectSignature EffectSignature::with_head(const EffectId& id) const {
  std::vector<EffectId> out;
  out.reserve(ids_->size() + 1);
  out.push_back(id);
  out.insert(out.end(), ids_->begin(), ids_->end());
  return EffectSignature(std::move(out));
}

}  // namespace probeff
