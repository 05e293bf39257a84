#include "nilcount/ellipsoid.hpp"

#include <cmath>
#include <limits>

#include "nilcount/error.hpp"

namespace nilcount {

namespace {

// Q(k) = sum_i d_i (k_i + sum_{j>i} u_ij k_j)^2 for G = U^T D U, U unit upper.
void ldl(int n, const std::vector<double>& g, std::vector<double>& d, std::vector<double>& u) {
  d.assign(n, 0.0);
  u.assign(n * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = g[i * n + i];
    for (int l = 0; l < i; ++l) s -= d[l] * u[l * n + i] * u[l * n + i];
    if (!(s > 0)) fail(Errc::singular, "quadratic form is not positive definite");
    d[i] = s;
    u[i * n + i] = 1;
    for (int j = i + 1; j < n; ++j) {
      double t = g[i * n + j];
      for (int l = 0; l < i; ++l) t -= d[l] * u[l * n + i] * u[l * n + j];
      u[i * n + j] = t / s;
    }
  }
}

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

constexpr double kSlack = 1e-7;

// Range of k_i given the outer coordinates; deliberately generous.
template <class F>
bool level_range(double center, double rem, double di, F&& out) {
  double r = rem > 0 ? std::sqrt(rem / di) : 0.0;
  double slack = kSlack * (1 + r + std::abs(center));
  if (rem < 0 && -rem > kSlack * di * (1 + center * center)) return false;
  double lo = std::ceil(center - r - slack), hi = std::floor(center + r + slack);
  if (lo > hi) return false;
  if (std::abs(lo) > 9e15 || std::abs(hi) > 9e15) fail(Errc::overflow, "ellipsoid too large to enumerate");
  out(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi));
  return true;
}

}  // namespace

struct IntegerEllipsoid::Leaf {
  // f(x) = g x^2 + 2 h x + c0 with x the innermost coordinate.
  i128 g, h, c0;
  i128 f(i128 x) const { return (g * x + 2 * h) * x + c0; }
  // Inclusive integer interval with f <= T, or empty (lo > hi).
  void interval(i128 T, i128& lo, i128& hi) const {
    i128 xm = floor_div(-h, g);
    i128 x1 = f(xm) <= f(xm + 1) ? xm : xm + 1;
    if (f(x1) > T) {
      lo = 1;
      hi = 0;
      return;
    }
    long double disc = static_cast<long double>(h) * static_cast<long double>(h) -
                       static_cast<long double>(g) * static_cast<long double>(c0 - T);
    long double s = disc > 0 ? std::sqrt(disc) : 0.0L;
    long double gd = static_cast<long double>(g);
    hi = static_cast<i128>(std::floor((-static_cast<long double>(h) + s) / gd));
    lo = static_cast<i128>(std::ceil((-static_cast<long double>(h) - s) / gd));
    if (hi < x1) hi = x1;
    if (lo > x1) lo = x1;
    while (f(hi + 1) <= T) ++hi;
    while (f(hi) > T) --hi;
    while (f(lo - 1) <= T) --lo;
    while (f(lo) > T) ++lo;
  }
};

IntegerEllipsoid::IntegerEllipsoid(int n, std::vector<std::int64_t> gram) : n_(n), gram_(std::move(gram)) {
  if (n < 1 || gram_.size() != static_cast<size_t>(n * n)) fail(Errc::dimension_mismatch, "bad Gram matrix shape");
  std::vector<double> g(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (gram_[i * n + j] != gram_[j * n + i]) fail(Errc::invalid_argument, "Gram matrix is not symmetric");
      g[i * n + j] = static_cast<double>(gram_[i * n + j]);
      max_entry_ = std::max<std::int64_t>(max_entry_, std::abs(gram_[i * n + j]));
    }
  if (max_entry_ > (std::int64_t(1) << 52)) fail(Errc::overflow, "Gram entries too large");
  ldl(n, g, d_, u_);
  Matrix inv = Matrix::from_doubles(n, n, g).inverse();
  for (int i = 0; i < n; ++i) extent_.push_back(std::sqrt(std::max(inv(i, i), 0.0)));
}

i128 IntegerEllipsoid::value(std::span<const std::int64_t> k) const {
  i128 s = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) s += static_cast<i128>(gram_[i * n_ + j]) * k[i] * k[j];
  return s;
}

template <class Visit>
void IntegerEllipsoid::walk(i128 T, Visit&& visit) const {
  if (T < 0) return;
  // Coordinates must keep every intermediate below ~2^120.
  double tb = static_cast<double>(T);
  for (int i = 0; i < n_; ++i) {
    double kmax = std::sqrt(tb) * extent_[i] * 2 + 4;
    if (kmax * kmax * static_cast<double>(max_entry_) * n_ * n_ > 1e35)
      fail(Errc::overflow, "ellipsoid coordinates too large for exact enumeration");
  }
  std::vector<std::int64_t> k(n_, 0);
  double Td = static_cast<double>(T);
  auto leaf = [&]() {
    Leaf lf;
    lf.g = gram_[0];
    lf.h = 0;
    lf.c0 = 0;
    for (int j = 1; j < n_; ++j) lf.h += static_cast<i128>(gram_[j]) * k[j];
    for (int i = 1; i < n_; ++i)
      for (int j = 1; j < n_; ++j) lf.c0 += static_cast<i128>(gram_[i * n_ + j]) * k[i] * k[j];
    i128 lo, hi;
    lf.interval(T, lo, hi);
    if (lo <= hi) visit(k, static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi));
  };
  auto rec = [&](auto&& self, int level, double partial) -> void {
    if (level == 0) {
      leaf();
      return;
    }
    double c = 0;
    for (int j = level + 1; j < n_; ++j) c -= u_[level * n_ + j] * k[j];
    level_range(c, Td - partial, d_[level], [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t v = lo; v <= hi; ++v) {
        k[level] = v;
        double dv = v - c;
        self(self, level - 1, partial + d_[level] * dv * dv);
      }
      k[level] = 0;
    });
  };
  rec(rec, n_ - 1, 0.0);
}

std::int64_t IntegerEllipsoid::count(i128 T) const {
  std::int64_t total = 0;
  walk(T, [&](const std::vector<std::int64_t>&, std::int64_t lo, std::int64_t hi) { total += hi - lo + 1; });
  return total;
}

void IntegerEllipsoid::for_each(i128 T, const std::function<void(std::span<const std::int64_t>)>& fn) const {
  walk(T, [&](std::vector<std::int64_t>& k, std::int64_t lo, std::int64_t hi) {
    for (std::int64_t x = lo; x <= hi; ++x) {
      k[0] = x;
      fn(k);
    }
    k[0] = 0;
  });
}

RealEllipsoid::RealEllipsoid(int n, std::vector<double> gram) : n_(n), gram_(std::move(gram)) {
  if (n < 1 || gram_.size() != static_cast<size_t>(n * n)) fail(Errc::dimension_mismatch, "bad Gram matrix shape");
  ldl(n, gram_, d_, u_);
}

double RealEllipsoid::value(std::span<const std::int64_t> k) const {
  double s = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) s += gram_[i * n_ + j] * static_cast<double>(k[i]) * static_cast<double>(k[j]);
  return s;
}

template <class Visit>
void RealEllipsoid::walk(double T, Visit&& visit) const {
  if (T < 0) return;
  std::vector<std::int64_t> k(n_, 0);
  auto leaf = [&]() {
    double g = gram_[0], h = 0, c0 = 0;
    for (int j = 1; j < n_; ++j) h += gram_[j] * k[j];
    for (int i = 1; i < n_; ++i)
      for (int j = 1; j < n_; ++j) c0 += gram_[i * n_ + j] * static_cast<double>(k[i]) * static_cast<double>(k[j]);
    double disc = h * h - g * (c0 - T);
    if (disc < 0) return;
    double s = std::sqrt(disc);
    double lo = std::ceil((-h - s) / g), hi = std::floor((-h + s) / g);
    if (lo <= hi) visit(k, static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi));
  };
  auto rec = [&](auto&& self, int level, double partial) -> void {
    if (level == 0) {
      leaf();
      return;
    }
    double c = 0;
    for (int j = level + 1; j < n_; ++j) c -= u_[level * n_ + j] * k[j];
    level_range(c, T - partial, d_[level], [&](std::int64_t lo, std::int64_t hi) {
      for (std::int64_t v = lo; v <= hi; ++v) {
        k[level] = v;
        double dv = v - c;
        self(self, level - 1, partial + d_[level] * dv * dv);
      }
      k[level] = 0;
    });
  };
  rec(rec, n_ - 1, 0.0);
}

std::int64_t RealEllipsoid::count(double T) const {
  std::int64_t total = 0;
  walk(T, [&](const std::vector<std::int64_t>&, std::int64_t lo, std::int64_t hi) { total += hi - lo + 1; });
  return total;
}

void RealEllipsoid::for_each(double T, const std::function<void(std::span<const std::int64_t>)>& fn) const {
  walk(T, [&](std::vector<std::int64_t>& k, std::int64_t lo, std::int64_t hi) {
    for (std::int64_t x = lo; x <= hi; ++x) {
      k[0] = x;
      fn(k);
    }
    k[0] = 0;
  });
}

ScaledGram integer_gram(const Matrix& A) {
  if (!A.is_exact()) fail(Errc::invalid_argument, "integer_gram needs an exact matrix");
  Matrix G = A.transpose() * A;
  int n = static_cast<int>(G.rows());
  BigInt D = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) D = lcm(D, denominator(G.exact(i, j)));
  std::vector<std::int64_t> gi(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Rational v = G.exact(i, j) * D;
      BigInt iv = numerator(v);
      if (boost::multiprecision::abs(iv) > (BigInt(1) << 52)) fail(Errc::overflow, "Gram entries too large");
      gi[i * n + j] = iv.convert_to<std::int64_t>();
    }
  return {IntegerEllipsoid(n, std::move(gi)), D};
}

RealEllipsoid real_gram(const Matrix& A) {
  Matrix G = A.inexact().transpose() * A.inexact();
  int n = static_cast<int>(G.rows());
  // Symmetrize to kill rounding asymmetry.
  std::vector<double> g(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g[i * n + j] = 0.5 * (G(i, j) + G(j, i));
  return RealEllipsoid(n, std::move(g));
}

namespace {

i128 to_i128(const BigInt& v) {
  if (boost::multiprecision::abs(v) > (BigInt(1) << 120)) fail(Errc::overflow, "bound exceeds 128-bit range");
  bool neg = v < 0;
  BigInt a = boost::multiprecision::abs(v);
  i128 r = static_cast<i128>(static_cast<std::uint64_t>(a >> 64)) << 64;
  r += static_cast<i128>((a & BigInt(std::numeric_limits<std::uint64_t>::max())).convert_to<std::uint64_t>());
  return neg ? -r : r;
}

}  // namespace

std::int64_t count_ellipsoid(const Matrix& A, const Rational& rho) {
  if (!A.square()) fail(Errc::dimension_mismatch, "count_ellipsoid needs a square matrix");
  if (rho < 0) fail(Errc::domain, "rho must be nonnegative");
  if (!A.is_exact()) return count_ellipsoid(A, to_double(rho));
  if (A.exact_determinant() == Rational(0)) fail(Errc::singular, "ellipsoid matrix is singular");
  auto sg = integer_gram(A);
  return sg.form.count(to_i128(floor_of(rho * rho * sg.scale)));
}

std::int64_t count_ellipsoid(const Matrix& A, double rho) {
  if (!A.square()) fail(Errc::dimension_mismatch, "count_ellipsoid needs a square matrix");
  if (!(rho >= 0)) fail(Errc::domain, "rho must be nonnegative");
  if (A.is_exact()) return count_ellipsoid(A, rational_from_double(rho));
  if (A.determinant() == 0) fail(Errc::singular, "ellipsoid matrix is singular");
  return real_gram(A).count(rho * rho);
}

void for_each_in_ellipsoid(const Matrix& A, const Rational& rho2,
                           const std::function<void(std::span<const std::int64_t>)>& fn) {
  if (A.is_exact()) {
    auto sg = integer_gram(A);
    sg.form.for_each(to_i128(floor_of(rho2 * sg.scale)), fn);
  } else {
    real_gram(A).for_each(to_double(rho2), fn);
  }
}

}  // namespace nilcount
