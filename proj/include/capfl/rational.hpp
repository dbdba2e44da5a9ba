#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace capfl {

/// Arbitrary-precision rational in canonical lowest terms (denominator > 0).
using Rational = mpq_class;

/// Parses "p/q", "p" or "-p/q". Rejects zero denominators and trailing junk.
/// The result is canonicalized.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& value);

/// Fixed-point decimal rendering, rounded half away from zero.
std::string to_decimal(const Rational& value, int digits = 6);

/// "p/q(≈decimal)" as used in reports.
std::string to_report(const Rational& value);

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Ceiling of a rational as an exact integer.
mpz_class ceil(const Rational& value);
mpz_class floor(const Rational& value);

}  // namespace capfl
