#include "nilcount/radius.hpp"

#include <cmath>

#include "nilcount/error.hpp"

namespace nilcount {

Radius Radius::from_double(double r) { return from_rational(rational_from_double(r)); }

Radius Radius::from_rational(const Rational& r) {
  if (r < 0) fail(Errc::domain, "radius must be nonnegative");
  Radius out;
  out.exact_ = r;
  out.squared_ = r * r;
  out.value_ = to_double(r);
  return out;
}

Radius Radius::sqrt_of(const Rational& r2) {
  if (r2 < 0) fail(Errc::domain, "radius square must be nonnegative");
  Radius out;
  out.squared_ = r2;
  out.value_ = std::sqrt(to_double(r2));
  BigInt n = numerator(r2), d = denominator(r2);
  BigInt sn = boost::multiprecision::sqrt(n), sd = boost::multiprecision::sqrt(d);
  if (sn * sn == n && sd * sd == d) out.exact_ = Rational(sn, sd);
  return out;
}

Radius Radius::parse(std::string_view text) {
  std::string s(text);
  auto lp = s.find("sqrt(");
  if (lp != std::string::npos) {
    auto rp = s.rfind(')');
    if (rp == std::string::npos || rp < lp + 5) fail(Errc::invalid_argument, "malformed radius '" + s + "'");
    return sqrt_of(parse_rational(s.substr(lp + 5, rp - lp - 5)));
  }
  return from_rational(parse_rational(s));
}

std::string Radius::to_string() const {
  if (exact_) return nilcount::to_string(*exact_);
  return "sqrt(" + nilcount::to_string(squared_) + ")";
}

Radius Radius::shifted(const Rational& d) const {
  if (!exact_) fail(Errc::invalid_argument, "cannot shift an irrational radius exactly");
  return from_rational(*exact_ + d);
}

}  // namespace nilcount
