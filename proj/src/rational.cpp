#include "nilcount/rational.hpp"

#include <cctype>
#include <cmath>

#include "nilcount/error.hpp"

namespace nilcount {

namespace {

BigInt parse_integer(std::string_view s, std::string_view whole) {
  if (s.empty()) fail(Errc::invalid_argument, "malformed number '" + std::string(whole) + "'");
  size_t i = 0;
  bool neg = false;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) fail(Errc::invalid_argument, "malformed number '" + std::string(whole) + "'");
  BigInt v = 0;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      fail(Errc::invalid_argument, "malformed number '" + std::string(whole) + "'");
    v = v * 10 + (s[i] - '0');
  }
  return neg ? BigInt(-v) : v;
}

BigInt pow10(long e) {
  BigInt p = 1;
  for (long i = 0; i < e; ++i) p *= 10;
  return p;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    BigInt ev = parse_integer(s.substr(e + 1), whole);
    if (ev > 4000 || ev < -4000) fail(Errc::invalid_argument, "exponent out of range in '" + std::string(whole) + "'");
    exponent = ev.convert_to<long>();
    s = s.substr(0, e);
  }
  std::string digits;
  bool neg = false;
  size_t i = 0;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    i = 1;
  }
  bool seen_dot = false, seen_digit = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (seen_dot) fail(Errc::invalid_argument, "malformed number '" + std::string(whole) + "'");
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) --exponent;
    } else {
      fail(Errc::invalid_argument, "malformed number '" + std::string(whole) + "'");
    }
  }
  if (!seen_digit) fail(Errc::invalid_argument, "malformed number '" + std::string(whole) + "'");
  BigInt mant = parse_integer(digits, whole);
  if (neg) mant = -mant;
  if (exponent >= 0) return Rational(mant * pow10(exponent));
  return Rational(mant, pow10(-exponent));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt p = parse_integer(trim(s.substr(0, slash)), text);
    BigInt q = parse_integer(trim(s.substr(slash + 1)), text);
    if (q == 0) fail(Errc::invalid_argument, "zero denominator in '" + std::string(text) + "'");
    return Rational(p, q);
  }
  if (s.find_first_of(".eE") != std::string_view::npos) return parse_decimal(s, text);
  return Rational(parse_integer(s, text));
}

std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) fail(Errc::invalid_argument, "non-finite value has no rational form");
  if (v == 0) return Rational(0);
  int e = 0;
  double f = std::frexp(v, &e);
  // f * 2^53 is an integer for every double.
  auto mant = static_cast<long long>(std::ldexp(f, 53));
  e -= 53;
  BigInt m(mant);
  if (e >= 0) return Rational(m << e);
  BigInt den = BigInt(1) << (-e);
  return Rational(m, den);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

BigInt floor_of(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (numerator(r) < 0 && q * denominator(r) != numerator(r)) q -= 1;
  return q;
}

BigInt ceil_of(const Rational& r) { return -floor_of(-r); }

bool is_integer(const Rational& r) { return denominator(r) == 1; }

BigInt gcd(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }

BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::abs(a / gcd(a, b) * b);
}

}  // namespace nilcount
