#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "nilcount/error.hpp"

namespace nilcount {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Accepts "p", "p/q" and finite decimals such as "-1.25" or "3e-2".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

// Every finite double is a dyadic rational; this returns it exactly.
Rational rational_from_double(double v);
double to_double(const Rational& r);

BigInt floor_of(const Rational& r);
BigInt ceil_of(const Rational& r);
bool is_integer(const Rational& r);

BigInt lcm(const BigInt& a, const BigInt& b);
BigInt gcd(const BigInt& a, const BigInt& b);

}  // namespace nilcount
