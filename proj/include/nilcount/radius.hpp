#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "nilcount/rational.hpp"

namespace nilcount {

// A ball radius with an exact square. R itself is exact when rational;
// sqrt_of() gives radii like sqrt(N + 1/2) whose square is exact.
class Radius {
 public:
  static Radius from_double(double r);
  static Radius from_rational(const Rational& r);
  static Radius sqrt_of(const Rational& r2);
  // "2.5", "3/2", "sqrt(9/2)".
  static Radius parse(std::string_view text);

  double value() const { return value_; }
  const Rational& squared() const { return squared_; }
  const std::optional<Rational>& exact() const { return exact_; }
  std::string to_string() const;

  // R + d for rational R and rational d; throws when R is irrational.
  Radius shifted(const Rational& d) const;

 private:
  double value_ = 0;
  Rational squared_;
  std::optional<Rational> exact_;
};

}  // namespace nilcount
