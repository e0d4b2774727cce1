#include "probeff/primval.hpp"

#include <charconv>
#include <cmath>

namespace probeff {

Kind kind_of(const PrimVal& v) {
  switch (v.index()) {
    case 0: return Kind::Real;
    case 1: return Kind::Int;
    case 2: return Kind::Bool;
    default: return Kind::Vec;
  }
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Real: return "real";
    case Kind::Int: return "int";
    case Kind::Bool: return "bool";
    case Kind::Vec: return "vec";
  }
  return "?";
}

Kind kind_from_name(const std::string& name) {
  if (name == "real") return Kind::Real;
  if (name == "int") return Kind::Int;
  if (name == "bool") return Kind::Bool;
  if (name == "vec") return Kind::Vec;
  throw config_error("unknown kind '" + name + "' (expected real|int|bool|vec)");
}

bool prim_equal(const PrimVal& a, const PrimVal& b) { return a == b; }

std::string real_to_string(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

std::string prim_to_string(const PrimVal& v) {
  switch (v.index()) {
    case 0: return real_to_string(std::get<double>(v));
    case 1: return std::to_string(std::get<std::int64_t>(v));
    case 2: return std::get<bool>(v) ? "true" : "false";
    default: {
      std::string out = "[";
      const auto& xs = std::get<std::vector<double>>(v);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += real_to_string(xs[i]);
      }
      return out + "]";
    }
  }
}

namespace {
[[noreturn]] void bad_tag(const PrimVal& v, Kind want) {
  throw internal_error(std::string("value tag mismatch: have ") +
                       kind_name(kind_of(v)) + ", expected " + kind_name(want));
}
}  // namespace

double as_real(const PrimVal& v) {
  if (const auto* p = std::get_if<double>(&v)) return *p;
  bad_tag(v, Kind::Real);
}

std::int64_t as_int(const PrimVal& v) {
  if (const auto* p = std::get_if<std::int64_t>(&v)) return *p;
  bad_tag(v, Kind::Int);
}

bool as_bool(const PrimVal& v) {
  if (const auto* p = std::get_if<bool>(&v)) return *p;
  bad_tag(v, Kind::Bool);
}

const std::vector<double>& as_vec(const PrimVal& v) {
  if (const auto* p = std::get_if<std::vector<double>>(&v)) return *p;
  bad_tag(v, Kind::Vec);
}

}  // namespace probeff
