#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "probeff/primval.hpp"

namespace probeff {

// An observable-variable name. Non-empty by construction.
class ObsVar {
 public:
  explicit ObsVar(std::string name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

struct EnvEntry {
  std::string name;
  Kind kind;
  std::vector<PrimVal> values;
};

// Ordered record from observable-variable names to lists of typed values.
// Consumed front-to-back during execution, and reused as the output carrier
// for traced samples. Immutable: updates return new environments.
//
// The kind is declared per entry and checked dynamically at every get, set
// and read; a mismatch fails fast with the variable name in the error.
class Env {
 public:
  Env() = default;

  static Env nil() { return Env(); }

  // Prepends an entry. The name must be absent and all values must match the
  // declared kind.
  Env cons(const ObsVar& name, Kind kind, std::vector<PrimVal> values) const;

  bool has(const std::string& name) const;
  const std::vector<PrimVal>& get(const ObsVar& name) const;
  const std::vector<PrimVal>& get(const std::string& name) const;
  Kind kind_of_entry(const std::string& name) const;

  // Replaces an entry's values in place (order of entries preserved).
  Env set(const ObsVar& name, std::vector<PrimVal> values) const;
  Env set(const std::string& name, std::vector<PrimVal> values) const;

  const std::vector<EnvEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const Env& a, const Env& b);

 private:
  std::vector<EnvEntry> entries_;
};

// Free-function spellings of the record operations.
Env env_cons(const ObsVar& name, Kind kind, std::vector<PrimVal> values,
             const Env& rest);
const std::vector<PrimVal>& env_get(const ObsVar& name, const Env& env);
Env env_set(const ObsVar& name, std::vector<PrimVal> values, const Env& env);

// JSON form: an ordered array of {"name": ..., "kind": ..., "values": [...]}.
nlohmann::ordered_json env_to_json(const Env& env);
Env env_from_json(const nlohmann::json& j);

nlohmann::ordered_json prim_to_json(const PrimVal& v);
PrimVal prim_from_json(const nlohmann::json& j, Kind kind,
                       const std::string& where);

}  // namespace probeff
