#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "probeff/errors.hpp"

namespace probeff {

// Value universe of primitive distributions. Every value that crosses a
// Sample/Observe boundary, lives in an environment entry, or lands in a
// sample trace is one of these.
using PrimVal = std::variant<double, std::int64_t, bool, std::vector<double>>;

enum class Kind { Real, Int, Bool, Vec };

Kind kind_of(const PrimVal& v);
const char* kind_name(Kind k);
Kind kind_from_name(const std::string& name);  // "real" | "int" | "bool" | "vec"

bool prim_equal(const PrimVal& a, const PrimVal& b);

// Shortest round-trip rendering ("0.7", not "0.69999999999999996").
std::string real_to_string(double x);
std::string prim_to_string(const PrimVal& v);

// Checked accessors. A mismatch means a handler or smart constructor re-tagged
// a node result wrongly, so these throw internal_error.
double as_real(const PrimVal& v);
std::int64_t as_int(const PrimVal& v);
bool as_bool(const PrimVal& v);
const std::vector<double>& as_vec(const PrimVal& v);

}  // namespace probeff
