#include "moran/rational.hpp"

#include "moran/errors.hpp"

namespace moran {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ConfigError("empty rational literal");
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      BigInt p(text);
      return Rational(p);
    }
    std::string num = text.substr(0, slash);
    std::string den = text.substr(slash + 1);
    if (num.empty() || den.empty()) throw ConfigError("malformed rational '" + text + "'");
    BigInt p(num), q(den);
    if (q == 0) throw ConfigError("zero denominator in '" + text + "'");
    return Rational(p, q);
  } catch (const std::runtime_error& e) {
    throw ConfigError("malformed rational '" + text + "': " + e.what());
  }
}

std::string rational_str(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

BigInt rational_floor(const Rational& q) {
  BigInt n = numerator(q), d = denominator(q);
  BigInt t = n / d;  // truncates toward zero
  if (n < 0 && t * d != n) --t;
  return t;
}

double rational_double(const Rational& q) { return q.convert_to<double>(); }

std::optional<Rational> rational_sqrt_exact(const Rational& q) {
  if (q < 0) return std::nullopt;
  BigInt n = numerator(q), d = denominator(q);
  BigInt rn = sqrt(n), rd = sqrt(d);
  if (rn * rn != n || rd * rd != d) return std::nullopt;
  return Rational(rn, rd);
}

Rational rational_pow(const Rational& q, unsigned k) {
  Rational acc(1);
  Rational base = q;
  while (k) {
    if (k & 1u) acc *= base;
    base *= base;
    k >>= 1u;
  }
  return acc;
}

}  // namespace moran
