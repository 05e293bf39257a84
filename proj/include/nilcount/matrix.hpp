#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nilcount/rational.hpp"

namespace nilcount {

// Dense row-major matrix. When built from rationals the exact entries are
// kept alongside the doubles and survive products, transposes and inverses
// of exact operands. Mixing exact and inexact operands yields an inexact
// result; there is no implicit rounding in the other direction.
class Matrix {
 public:
  Matrix() = default;
  static Matrix identity(size_t n);
  static Matrix zero(size_t rows, size_t cols);
  static Matrix diagonal(const std::vector<Rational>& d);
  static Matrix from_doubles(size_t rows, size_t cols, std::vector<double> values);
  static Matrix from_rationals(size_t rows, size_t cols, std::vector<Rational> values);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool is_exact() const { return exact_.has_value(); }

  double operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }
  const Rational& exact(size_t i, size_t j) const;
  const std::vector<double>& values() const { return data_; }

  Matrix operator*(const Matrix& other) const;
  Matrix operator+(const Matrix& other) const;
  Matrix operator-(const Matrix& other) const;
  Matrix scaled(const Rational& c) const;
  Matrix scaled(double c) const;
  Matrix transpose() const;
  Matrix inverse() const;
  Matrix inexact() const;

  double determinant() const;
  std::optional<Rational> exact_determinant() const;

  std::vector<double> apply(std::span<const double> v) const;
  std::vector<Rational> apply_exact(std::span<const Rational> v) const;

  bool is_integral() const;
  bool is_zero(double tol = 0) const;
  bool operator==(const Matrix& other) const;

 private:
  size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
  std::optional<std::vector<Rational>> exact_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace nilcount
