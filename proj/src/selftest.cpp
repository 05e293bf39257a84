#include "nilcount/selftest.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>

namespace nilcount {

namespace {

using Big = boost::multiprecision::cpp_dec_float_50;

Big big(const Rational& r) { return Big(numerator(r)) / Big(denominator(r)); }

std::vector<Big> entries(const Matrix& m) {
  std::vector<Big> v;
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) v.push_back(m.is_exact() ? big(m.exact(i, j)) : Big(m(i, j)));
  return v;
}

// |A k|^2 for the product A = M L.
Big sq(const std::vector<Big>& A, size_t n, const std::vector<std::int64_t>& k, size_t off) {
  Big s = 0;
  for (size_t i = 0; i < n; ++i) {
    Big r = 0;
    for (size_t j = 0; j < n; ++j) r += A[i * n + j] * Big(k[off + j]);
    s += r * r;
  }
  return s;
}

std::vector<Big> product(const Matrix& M, const Matrix& L) {
  const auto a = entries(M), b = entries(L);
  const size_t n = M.rows();
  std::vector<Big> c(n * n, Big(0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      for (size_t k = 0; k < n; ++k) c[i * n + j] += a[i * n + k] * b[k * n + j];
  return c;
}

// Half-width of the integer box: |k_i| <= |row_i(A^-1)| rho.
std::int64_t width(const Matrix& M, const Matrix& L, size_t i, double rho) {
  const Matrix inv = (M.inexact() * L.inexact()).inverse();
  double s = 0;
  for (size_t j = 0; j < inv.cols(); ++j) s += inv(i, j) * inv(i, j);
  return static_cast<std::int64_t>(std::ceil(rho * std::sqrt(s))) + 1;
}

}  // namespace

std::int64_t naive_count(const Problem& p, const Radius& R) {
  validate_problem(p);
  const size_t q = p.group.q(), m = p.group.m();
  const double alpha = p.alpha();
  const auto A = product(p.norm.M1(), p.lattice.L1()), B = product(p.norm.M2(), p.lattice.L2());
  std::vector<std::int64_t> w;
  for (size_t i = 0; i < q; ++i) w.push_back(width(p.norm.M1(), p.lattice.L1(), i, R.value()));
  for (size_t i = 0; i < m; ++i) w.push_back(width(p.norm.M2(), p.lattice.L2(), i, R.value() * R.value()));
  double cells = 1;
  for (auto x : w) cells *= 2.0 * x + 1;
  if (cells > 5e7) fail(Errc::budget, "naive count box too large");

  const Big R2 = big(R.squared());
  const Big Rb = sqrt(R2);
  const Big a(alpha);
  std::vector<std::int64_t> k(w.size());
  for (size_t i = 0; i < w.size(); ++i) k[i] = -w[i];
  std::int64_t count = 0;
  while (true) {
    const Big x2 = sq(A, q, k, 0), t2 = sq(B, m, k, q);
    Big lhs, rhs;
    if (alpha == 2) {
      lhs = x2 + sqrt(t2);
      rhs = R2;
    } else if (alpha == 4) {
      lhs = x2 * x2 + t2;
      rhs = R2 * R2;
    } else if (alpha == 1) {
      lhs = sqrt(x2) + sqrt(sqrt(t2));
      rhs = Rb;
    } else {
      lhs = pow(x2, a / 2) + pow(t2, a / 4);
      rhs = pow(Rb, a);
    }
    if (lhs - rhs <= Big("1e-40") * (1 + rhs)) ++count;
    size_t i = 0;
    for (; i < k.size() && k[i] == w[i]; ++i) k[i] = -w[i];
    if (i == k.size()) break;
    ++k[i];
  }
  return count;
}

SelftestReport selftest(int workers) {
  SelftestReport rep;
  CounterOptions opt;
  opt.workers = workers;
  auto run = [&](const std::string& name, const Problem& p, const std::string& radius) {
    SelftestCase c;
    c.name = name;
    c.alpha = p.alpha();
    c.radius = radius;
    const Radius R = Radius::parse(radius);
    const auto r = count_ball(p, BallQuery{R, std::nullopt}, opt);
    c.count = r.count;
    c.exact = r.exact;
    c.naive = naive_count(p, R);
    rep.cases.push_back(c);
  };
  const auto h1 = builtin::heisenberg(1);
  for (double a : {1.0, 2.0, 4.0})
    for (const char* R : {"1", "3/2", "2", "3", "4"})
      run("H1 identity", {h1, NormParams::standard(a, 2, 1), LatticeSpec::identity(2, 1)}, R);
  for (const char* R : {"2", "7/2", "sqrt(10)"})
    run("H1 identity", {h1, NormParams::standard(3, 2, 1), LatticeSpec::identity(2, 1)}, R);
  run("H1 identity", {h1, NormParams::standard(1.5, 2, 1), LatticeSpec::identity(2, 1)}, "3");
  const Matrix shear = Matrix::from_rationals(2, 2, {Rational(1), Rational(1, 2), Rational(0), Rational(1)});
  const Matrix centre = Matrix::from_rationals(1, 1, {Rational(3, 2)});
  for (const char* R : {"2", "3"})
    run("H1 sheared M", {h1, NormParams(2, shear, centre), LatticeSpec::identity(2, 1)}, R);
  run("H1pol gamma_(2)", {builtin::polarized_heisenberg(1), NormParams::standard(4, 2, 1), LatticeSpec::gamma_b({2})},
      "3");
  run("H2 identity", {builtin::heisenberg(2), NormParams::standard(2, 4, 1), LatticeSpec::identity(4, 1)}, "5/2");
  run("F3 identity", {builtin::free_carnot(3), NormParams::standard(4, 3, 3), LatticeSpec::identity(3, 3)}, "2");
  return rep;
}

}  // namespace nilcount
