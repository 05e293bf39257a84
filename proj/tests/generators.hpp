#pragma once

#include <random>

#include "nilcount/counter.hpp"

namespace gen {

using nilcount::Matrix;
using nilcount::Rational;

inline Rational rational(std::mt19937_64& rng, int maxnum, int maxden) {
  std::uniform_int_distribution<int> n(-maxnum, maxnum), d(1, maxden);
  return Rational(n(rng), d(rng));
}

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline Matrix rational_matrix(std::mt19937_64& rng, size_t n, int maxnum, int maxden) {
  while (true) {
    std::vector<Rational> v(n * n);
    for (auto& x : v) x = rational(rng, maxnum, maxden);
    Matrix m = Matrix::from_rationals(n, n, std::move(v));
    if (*m.exact_determinant() != 0) return m;
  }
}

// Well-conditioned invertible rational matrix: identity plus a small perturbation.
inline Matrix near_identity(std::mt19937_64& rng, size_t n, int maxden) {
  std::vector<Rational> v(n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      std::uniform_int_distribution<int> d(1, maxden), k(-1, 1);
      v[i * n + j] = (i == j ? Rational(1) : Rational(0)) + Rational(k(rng), 2 * d(rng));
    }
  Matrix m = Matrix::from_rationals(n, n, std::move(v));
  return *m.exact_determinant() != 0 ? m : Matrix::identity(n);
}

inline Matrix double_matrix(std::mt19937_64& rng, size_t n, double a, double b) {
  std::vector<double> v(n * n);
  for (auto& x : v) x = uniform(rng, a, b);
  return Matrix::from_doubles(n, n, std::move(v));
}

inline nilcount::GroupElement element(std::mt19937_64& rng, int q, int m, double scale = 1.0) {
  nilcount::GroupElement g;
  for (int i = 0; i < q; ++i) g.x.push_back(uniform(rng, -scale, scale));
  for (int i = 0; i < m; ++i) g.t.push_back(uniform(rng, -scale, scale));
  return g;
}

inline nilcount::ExactElement exact_element(std::mt19937_64& rng, int q, int m, int maxnum, int maxden) {
  nilcount::ExactElement g;
  for (int i = 0; i < q; ++i) g.x.push_back(rational(rng, maxnum, maxden));
  for (int i = 0; i < m; ++i) g.t.push_back(rational(rng, maxnum, maxden));
  return g;
}

// A random step-two group with small rational structure matrices.
inline nilcount::GroupSpec group(std::mt19937_64& rng, int q, int m) {
  while (true) {
    std::vector<Matrix> U;
    for (int l = 0; l < m; ++l) {
      std::vector<Rational> v(q * q);
      for (auto& x : v) x = Rational(std::uniform_int_distribution<int>(-2, 2)(rng));
      U.push_back(Matrix::from_rationals(q, q, std::move(v)));
    }
    try {
      return nilcount::GroupSpec(q, m, std::move(U));
    } catch (const nilcount::Error&) {
    }
  }
}

}  // namespace gen
