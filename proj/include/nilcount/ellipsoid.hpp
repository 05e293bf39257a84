#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nilcount/matrix.hpp"

namespace nilcount {

using i128 = __int128;

// Integer points of {k in Z^n : k^T G k <= T} for an integer positive definite
// Gram matrix. Pruning uses a floating LDL^T factorization with a safety
// margin; every decision about a point is made in exact integer arithmetic,
// and the innermost coordinate is counted as an interval.
class IntegerEllipsoid {
 public:
  IntegerEllipsoid(int n, std::vector<std::int64_t> gram);

  int dim() const { return n_; }
  std::int64_t entry(int i, int j) const { return gram_[i * n_ + j]; }
  i128 value(std::span<const std::int64_t> k) const;
  std::int64_t count(i128 T) const;
  void for_each(i128 T, const std::function<void(std::span<const std::int64_t>)>& fn) const;

 private:
  struct Leaf;
  template <class Visit>
  void walk(i128 T, Visit&& visit) const;

  int n_;
  std::vector<std::int64_t> gram_;
  std::vector<double> d_, u_, extent_;
  std::int64_t max_entry_ = 0;
};

// The same over doubles; no exactness claims.
class RealEllipsoid {
 public:
  RealEllipsoid(int n, std::vector<double> gram);

  int dim() const { return n_; }
  double value(std::span<const std::int64_t> k) const;
  std::int64_t count(double T) const;
  void for_each(double T, const std::function<void(std::span<const std::int64_t>)>& fn) const;

 private:
  template <class Visit>
  void walk(double T, Visit&& visit) const;

  int n_;
  std::vector<double> gram_, d_, u_;
};

// Gram matrix A^T A of an exact matrix, written as G / scale with G integral.
struct ScaledGram {
  IntegerEllipsoid form;
  BigInt scale;
};

ScaledGram integer_gram(const Matrix& A);
RealEllipsoid real_gram(const Matrix& A);

// #{k in Z^n : |Ak| <= rho}. Exact when A is exact.
std::int64_t count_ellipsoid(const Matrix& A, const Rational& rho);
std::int64_t count_ellipsoid(const Matrix& A, double rho);

// All k in Z^n with |Ak|^2 <= rho2 (exact when A is exact).
void for_each_in_ellipsoid(const Matrix& A, const Rational& rho2,
                           const std::function<void(std::span<const std::int64_t>)>& fn);

}  // namespace nilcount
