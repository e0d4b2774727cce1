#include "probeff/env.hpp"

#include "probeff/errors.hpp"

namespace probeff {

ObsVar::ObsVar(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw model_error("observable-variable name must be non-empty");
  // '!' is reserved for the family-derived labels of untagged sites.
  if (name_.find('!') != std::string::npos)
    throw model_error("observable-variable name '" + name_ +
                      "' must not contain '!'");
}

namespace {
void check_kinds(const std::string& name, Kind kind,
                 const std::vector<PrimVal>& values) {
  for (const auto& v : values)
    if (kind_of(v) != kind)
      throw model_error("environment entry '" + name + "' declared " +
                        kind_name(kind) + " but holds a " +
                        kind_name(kind_of(v)) + " value");
}
}  // namespace

Env Env::cons(const ObsVar& name, Kind kind, std::vector<PrimVal> values) const {
  if (has(name.name()))
    throw model_error("duplicate observable variable '" + name.name() +
                      "' in environment");
  check_kinds(name.name(), kind, values);
  Env out;
  out.entries_.reserve(entries_.size() + 1);
  out.entries_.push_back(EnvEntry{name.name(), kind, std::move(values)});
  out.entries_.insert(out.entries_.end(), entries_.begin(), entries_.end());
  return out;
}

bool Env::has(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return true;
  return false;
}

const std::vector<PrimVal>& Env::get(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e.values;
  throw model_error("observable variable '" + name + "' is not in the environment");
}

const std::vector<PrimVal>& Env::get(const ObsVar& name) const {
  return get(name.name());
}

Kind Env::kind_of_entry(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e.kind;
  throw model_error("observable variable '" + name + "' is not in the environment");
}

Env Env::set(const std::string& name, std::vector<PrimVal> values) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) {
      check_kinds(name, entries_[i].kind, values);
      Env out = *this;
      out.entries_[i].values = std::move(values);
      return out;
    }
  }
  throw model_error("observable variable '" + name + "' is not in the environment");
}

Env Env::set(const ObsVar& name, std::vector<PrimVal> values) const {
  return set(name.name(), std::move(values));
}

bool operator==(const Env& a, const Env& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    const auto& x = a.entries_[i];
    const auto& y = b.entries_[i];
    if (x.name != y.name || x.kind != y.kind || x.values != y.values)
      return false;
  }
  return true;
}

Env env_cons(const ObsVar& name, Kind kind, std::vector<PrimVal> values,
             const Env& rest) {
  return rest.cons(name, kind, std::move(values));
}

const std::vector<PrimVal>& env_get(const ObsVar& name, const Env& env) {
  return env.get(name);
}

Env env_set(const ObsVar& name, std::vector<PrimVal> values, const Env& env) {
  return env.set(name, std::move(values));
}

nlohmann::ordered_json prim_to_json(const PrimVal& v) {
  switch (v.index()) {
    case 0: return std::get<double>(v);
    case 1: return std::get<std::int64_t>(v);
    case 2: return std::get<bool>(v);
    default: return std::get<std::vector<double>>(v);
  }
}

PrimVal prim_from_json(const nlohmann::json& j, Kind kind,
                       const std::string& where) {
  switch (kind) {
    case Kind::Real:
      if (j.is_number()) return j.get<double>();
      break;
    case Kind::Int:
      if (j.is_number_integer()) return j.get<std::int64_t>();
      break;
    case Kind::Bool:
      if (j.is_boolean()) return j.get<bool>();
      break;
    case Kind::Vec:
      if (j.is_array()) {
        std::vector<double> xs;
        xs.reserve(j.size());
        for (const auto& x : j) {
          if (!x.is_number())
            throw config_error(where + ": vec element is not a number");
          xs.push_back(x.get<double>());
        }
        return xs;
      }
      break;
  }
  throw config_error(where + ": value " + j.dump() + " is not of kind " +
                     kind_name(kind));
}

nlohmann::ordered_json env_to_json(const Env& env) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& e : env.entries()) {
    nlohmann::ordered_json values = nlohmann::ordered_json::array();
    for (const auto& v : e.values) values.push_back(prim_to_json(v));
    out.push_back({{"name", e.name}, {"kind", kind_name(e.kind)}, {"values", values}});
  }
  return out;
}

Env env_from_json(const nlohmann::json& j) {
  if (!j.is_array())
    throw config_error("environment JSON must be an array of entries");
  // Entries arrive in display order; cons prepends, so build back to front.
  Env env;
  for (auto it = j.rbegin(); it != j.rend(); ++it) {
    const auto& entry = *it;
    if (!entry.is_object() || !entry.contains("name") || !entry.contains("kind"))
      throw config_error("environment entry needs fields name, kind, values");
    const std::string name = entry.at("name").get<std::string>();
    const Kind kind = kind_from_name(entry.at("kind").get<std::string>());
    std::vector<PrimVal> values;
    if (entry.contains("values")) {
      if (!entry.at("values").is_array())
        throw config_error("environment entry '" + name + "': values must be an array");
      for (const auto& v : entry.at("values"))
        values.push_back(prim_from_json(v, kind, "environment entry '" + name + "'"));
    }
    try {
      env = env.cons(ObsVar(name), kind, std::move(values));
    } catch (const model_error& e) {
      throw config_error(e.what());
    }
  }
  return env;
}

}  // namespace probeff
