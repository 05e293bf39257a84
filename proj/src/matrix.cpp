#include "nilcount/matrix.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "nilcount/error.hpp"

namespace nilcount {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EMat to_eigen(const Matrix& m) {
  EMat e(m.rows(), m.cols());
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

std::vector<double> doubles_of(const std::vector<Rational>& v) {
  std::vector<double> d(v.size());
  for (size_t i = 0; i < v.size(); ++i) d[i] = to_double(v[i]);
  return d;
}

// Gauss-Jordan over Q. Returns nullopt when singular.
std::optional<std::vector<Rational>> exact_inverse(size_t n, std::vector<Rational> a) {
  std::vector<Rational> inv(n * n, Rational(0));
  for (size_t i = 0; i < n; ++i) inv[i * n + i] = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && a[p * n + c] == 0) ++p;
    if (p == n) return std::nullopt;
    if (p != c)
      for (size_t j = 0; j < n; ++j) {
        std::swap(a[p * n + j], a[c * n + j]);
        std::swap(inv[p * n + j], inv[c * n + j]);
      }
    Rational piv = a[c * n + c];
    for (size_t j = 0; j < n; ++j) {
      a[c * n + j] /= piv;
      inv[c * n + j] /= piv;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == c || a[r * n + c] == 0) continue;
      Rational f = a[r * n + c];
      for (size_t j = 0; j < n; ++j) {
        a[r * n + j] -= f * a[c * n + j];
        inv[r * n + j] -= f * inv[c * n + j];
      }
    }
  }
  return inv;
}

}  // namespace

Matrix Matrix::identity(size_t n) {
  std::vector<Rational> v(n * n, Rational(0));
  for (size_t i = 0; i < n; ++i) v[i * n + i] = 1;
  return from_rationals(n, n, std::move(v));
}

Matrix Matrix::zero(size_t rows, size_t cols) {
  return from_rationals(rows, cols, std::vector<Rational>(rows * cols, Rational(0)));
}

Matrix Matrix::diagonal(const std::vector<Rational>& d) {
  size_t n = d.size();
  std::vector<Rational> v(n * n, Rational(0));
  for (size_t i = 0; i < n; ++i) v[i * n + i] = d[i];
  return from_rationals(n, n, std::move(v));
}

Matrix Matrix::from_doubles(size_t rows, size_t cols, std::vector<double> values) {
  if (values.size() != rows * cols) fail(Errc::dimension_mismatch, "matrix data size does not match shape");
  for (double v : values)
    if (!std::isfinite(v)) fail(Errc::invalid_argument, "matrix entry is not finite");
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(values);
  return m;
}

Matrix Matrix::from_rationals(size_t rows, size_t cols, std::vector<Rational> values) {
  if (values.size() != rows * cols) fail(Errc::dimension_mismatch, "matrix data size does not match shape");
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = doubles_of(values);
  m.exact_ = std::move(values);
  return m;
}

const Rational& Matrix::exact(size_t i, size_t j) const {
  if (!exact_) fail(Errc::invalid_argument, "matrix has no exact entries");
  return (*exact_)[i * cols_ + j];
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (cols_ != o.rows_) fail(Errc::dimension_mismatch, "matrix product shape mismatch");
  if (exact_ && o.exact_) {
    std::vector<Rational> r(rows_ * o.cols_, Rational(0));
    for (size_t i = 0; i < rows_; ++i)
      for (size_t k = 0; k < cols_; ++k) {
        const Rational& a = (*exact_)[i * cols_ + k];
        if (a == 0) continue;
        for (size_t j = 0; j < o.cols_; ++j) r[i * o.cols_ + j] += a * (*o.exact_)[k * o.cols_ + j];
      }
    return from_rationals(rows_, o.cols_, std::move(r));
  }
  std::vector<double> r(rows_ * o.cols_, 0.0);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t k = 0; k < cols_; ++k)
      for (size_t j = 0; j < o.cols_; ++j) r[i * o.cols_ + j] += data_[i * cols_ + k] * o.data_[k * o.cols_ + j];
  return from_doubles(rows_, o.cols_, std::move(r));
}

Matrix Matrix::operator+(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) fail(Errc::dimension_mismatch, "matrix sum shape mismatch");
  if (exact_ && o.exact_) {
    std::vector<Rational> r(*exact_);
    for (size_t i = 0; i < r.size(); ++i) r[i] += (*o.exact_)[i];
    return from_rationals(rows_, cols_, std::move(r));
  }
  std::vector<double> r(data_);
  for (size_t i = 0; i < r.size(); ++i) r[i] += o.data_[i];
  return from_doubles(rows_, cols_, std::move(r));
}

Matrix Matrix::operator-(const Matrix& o) const { return *this + o.scaled(Rational(-1)); }

Matrix Matrix::scaled(const Rational& c) const {
  if (exact_) {
    std::vector<Rational> r(*exact_);
    for (auto& v : r) v *= c;
    return from_rationals(rows_, cols_, std::move(r));
  }
  return scaled(to_double(c));
}

Matrix Matrix::scaled(double c) const {
  std::vector<double> r(data_);
  for (auto& v : r) v *= c;
  return from_doubles(rows_, cols_, std::move(r));
}

Matrix Matrix::transpose() const {
  if (exact_) {
    std::vector<Rational> r(rows_ * cols_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) r[j * rows_ + i] = (*exact_)[i * cols_ + j];
    return from_rationals(cols_, rows_, std::move(r));
  }
  std::vector<double> r(rows_ * cols_);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j) r[j * rows_ + i] = data_[i * cols_ + j];
  return from_doubles(cols_, rows_, std::move(r));
}

Matrix Matrix::inverse() const {
  if (!square()) fail(Errc::dimension_mismatch, "inverse of a non-square matrix");
  if (exact_) {
    auto inv = exact_inverse(rows_, *exact_);
    if (!inv) fail(Errc::singular, "matrix is singular");
    return from_rationals(rows_, cols_, std::move(*inv));
  }
  EMat e = to_eigen(*this);
  Eigen::FullPivLU<EMat> lu(e);
  if (!lu.isInvertible()) fail(Errc::singular, "matrix is singular");
  EMat inv = lu.inverse();
  return from_doubles(rows_, cols_, std::vector<double>(inv.data(), inv.data() + inv.size()));
}

Matrix Matrix::inexact() const { return from_doubles(rows_, cols_, data_); }

double Matrix::determinant() const {
  if (!square()) fail(Errc::dimension_mismatch, "determinant of a non-square matrix");
  if (exact_) return to_double(*exact_determinant());
  if (rows_ == 0) return 1.0;
  return to_eigen(*this).fullPivLu().determinant();
}

std::optional<Rational> Matrix::exact_determinant() const {
  if (!exact_) return std::nullopt;
  if (!square()) fail(Errc::dimension_mismatch, "determinant of a non-square matrix");
  size_t n = rows_;
  std::vector<Rational> a(*exact_);
  Rational det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t p = c;
    while (p < n && a[p * n + c] == 0) ++p;
    if (p == n) return Rational(0);
    if (p != c) {
      for (size_t j = 0; j < n; ++j) std::swap(a[p * n + j], a[c * n + j]);
      det = -det;
    }
    det *= a[c * n + c];
    for (size_t r = c + 1; r < n; ++r) {
      if (a[r * n + c] == 0) continue;
      Rational f = a[r * n + c] / a[c * n + c];
      for (size_t j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
    }
  }
  return det;
}

std::vector<double> Matrix::apply(std::span<const double> v) const {
  if (v.size() != cols_) fail(Errc::dimension_mismatch, "matrix-vector shape mismatch");
  std::vector<double> r(rows_, 0.0);
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j) r[i] += data_[i * cols_ + j] * v[j];
  return r;
}

std::vector<Rational> Matrix::apply_exact(std::span<const Rational> v) const {
  if (!exact_) fail(Errc::invalid_argument, "matrix has no exact entries");
  if (v.size() != cols_) fail(Errc::dimension_mismatch, "matrix-vector shape mismatch");
  std::vector<Rational> r(rows_, Rational(0));
  for (size_t i = 0; i < rows_; ++i)
    for (size_t j = 0; j < cols_; ++j)
      if ((*exact_)[i * cols_ + j] != 0) r[i] += (*exact_)[i * cols_ + j] * v[j];
  return r;
}

bool Matrix::is_integral() const {
  if (exact_) {
    for (const auto& v : *exact_)
      if (!is_integer(v)) return false;
    return true;
  }
  return false;
}

bool Matrix::is_zero(double tol) const {
  if (exact_) {
    for (const auto& v : *exact_)
      if (v != 0) return false;
    return true;
  }
  for (double v : data_)
    if (std::abs(v) > tol) return false;
  return true;
}

bool Matrix::operator==(const Matrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_ || is_exact() != o.is_exact()) return false;
  if (exact_) return *exact_ == *o.exact_;
  return data_ == o.data_;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return dot(a, a); }

}  // namespace nilcount
