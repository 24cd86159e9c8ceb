#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace tvdist {

// Exact rational arithmetic, backed by GMP. Probabilities written "a/b"
// stay exact end-to-end; decimals are captured as the exact binary value
// of the parsed double.
using Rational = mpq_class;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Rational rational_from_double(double v) {
  Rational r(v);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& r) { return r.get_d(); }

// Parses "a/b" (b > 0 after canonicalization). Returns nullopt if the
// string is not of that shape.
inline std::optional<Rational> parse_fraction(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return std::nullopt;
  try {
    Rational r(s);
    r.canonicalize();
    if (r.get_den() == 0) return std::nullopt;
    return r;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

inline std::string to_string(const Rational& r) {
  return r.get_str();  // "a/b" or "a" when the denominator is 1
}

}  // namespace tvdist
