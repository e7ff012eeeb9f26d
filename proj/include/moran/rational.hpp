#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace moran {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational, always stored reduced with positive denominator.
using Rational = boost::multiprecision::cpp_rational;

// Parses "p/q" or a plain integer "p". Throws ConfigError on garbage or q == 0.
Rational parse_rational(const std::string& text);

// Canonical text form: "p" when the denominator is 1, else "p/q".
std::string rational_str(const Rational& q);

// floor(q) as an integer (exact, handles negatives).
BigInt rational_floor(const Rational& q);

double rational_double(const Rational& q);

// Exact square root if q is a ratio of perfect squares, nullopt otherwise.
std::optional<Rational> rational_sqrt_exact(const Rational& q);

// q^k for k >= 0.
Rational rational_pow(const Rational& q, unsigned k);

}  // namespace moran
