#include "nilcount/group.hpp"

#include <cmath>

#include "nilcount/error.hpp"

namespace nilcount {

namespace {

void check_dims(const GroupSpec& g, size_t xs, size_t ts) {
  if (xs != static_cast<size_t>(g.q()) || ts != static_cast<size_t>(g.m()))
    fail(Errc::dimension_mismatch, "group element has shape (" + std::to_string(xs) + "," + std::to_string(ts) +
                                       "), expected (" + std::to_string(g.q()) + "," + std::to_string(g.m()) + ")");
}

}  // namespace

GroupElement ExactElement::approx() const {
  GroupElement g;
  for (const auto& v : x) g.x.push_back(to_double(v));
  for (const auto& v : t) g.t.push_back(to_double(v));
  return g;
}

ExactElement exact_element(const GroupElement& g) {
  ExactElement e;
  for (double v : g.x) e.x.push_back(rational_from_double(v));
  for (double v : g.t) e.t.push_back(rational_from_double(v));
  return e;
}

GroupSpec::GroupSpec(int q, int m, std::vector<Matrix> U, std::string name)
    : q_(q), m_(m), U_(std::move(U)), name_(std::move(name)) {
  if (q < 2) fail(Errc::invalid_argument, "step-two groups need q >= 2");
  if (m < 1) fail(Errc::invalid_argument, "step-two groups need m >= 1");
  if (U_.size() != static_cast<size_t>(m)) fail(Errc::dimension_mismatch, "expected " + std::to_string(m) + " U matrices");
  bool nonabelian = false;
  for (size_t l = 0; l < U_.size(); ++l) {
    const Matrix& u = U_[l];
    if (u.rows() != static_cast<size_t>(q) || u.cols() != static_cast<size_t>(q))
      fail(Errc::dimension_mismatch, "U[" + std::to_string(l) + "] must be " + std::to_string(q) + "x" + std::to_string(q));
    if (!(u - u.transpose()).is_zero(1e-14)) nonabelian = true;
  }
  if (!nonabelian) fail(Errc::invalid_argument, "every U matrix is symmetric, so the group is abelian");
}

bool GroupSpec::is_exact() const {
  for (const auto& u : U_)
    if (!u.is_exact()) return false;
  return true;
}

std::vector<double> GroupSpec::bracket(std::span<const double> x, std::span<const double> y) const {
  std::vector<double> r(m_);
  for (int l = 0; l < m_; ++l) r[l] = dot(U_[l].apply(x), y);
  return r;
}

std::vector<Rational> GroupSpec::bracket(std::span<const Rational> x, std::span<const Rational> y) const {
  std::vector<Rational> r(m_, Rational(0));
  for (int l = 0; l < m_; ++l) {
    auto ux = U_[l].apply_exact(x);
    for (int i = 0; i < q_; ++i) r[l] += ux[i] * y[i];
  }
  return r;
}

GroupElement identity(const GroupSpec& g) {
  return {std::vector<double>(g.q(), 0.0), std::vector<double>(g.m(), 0.0)};
}

GroupElement compose(const GroupSpec& g, const GroupElement& a, const GroupElement& b) {
  check_dims(g, a.x.size(), a.t.size());
  check_dims(g, b.x.size(), b.t.size());
  auto br = g.bracket(a.x, b.x);
  GroupElement r;
  r.x.resize(g.q());
  r.t.resize(g.m());
  for (int i = 0; i < g.q(); ++i) r.x[i] = a.x[i] + b.x[i];
  for (int l = 0; l < g.m(); ++l) r.t[l] = a.t[l] + b.t[l] + 0.5 * br[l];
  return r;
}

GroupElement inverse(const GroupSpec& g, const GroupElement& a) {
  check_dims(g, a.x.size(), a.t.size());
  auto br = g.bracket(a.x, a.x);
  GroupElement r;
  for (double v : a.x) r.x.push_back(-v);
  for (int l = 0; l < g.m(); ++l) r.t.push_back(-a.t[l] + 0.5 * br[l]);
  return r;
}

GroupElement dilate(const GroupSpec& g, double r, const GroupElement& a) {
  check_dims(g, a.x.size(), a.t.size());
  if (!(r > 0)) fail(Errc::domain, "dilation factor must be positive");
  GroupElement d = a;
  for (auto& v : d.x) v *= r;
  for (auto& v : d.t) v *= r * r;
  return d;
}

ExactElement exact_identity(const GroupSpec& g) {
  return {std::vector<Rational>(g.q(), Rational(0)), std::vector<Rational>(g.m(), Rational(0))};
}

ExactElement compose(const GroupSpec& g, const ExactElement& a, const ExactElement& b) {
  check_dims(g, a.x.size(), a.t.size());
  check_dims(g, b.x.size(), b.t.size());
  auto br = g.bracket(std::span<const Rational>(a.x), std::span<const Rational>(b.x));
  ExactElement r;
  r.x.resize(g.q());
  r.t.resize(g.m());
  for (int i = 0; i < g.q(); ++i) r.x[i] = a.x[i] + b.x[i];
  for (int l = 0; l < g.m(); ++l) r.t[l] = a.t[l] + b.t[l] + br[l] / 2;
  return r;
}

ExactElement inverse(const GroupSpec& g, const ExactElement& a) {
  check_dims(g, a.x.size(), a.t.size());
  auto br = g.bracket(std::span<const Rational>(a.x), std::span<const Rational>(a.x));
  ExactElement r;
  for (const auto& v : a.x) r.x.push_back(-v);
  for (int l = 0; l < g.m(); ++l) r.t.push_back(-a.t[l] + br[l] / 2);
  return r;
}

ExactElement dilate(const GroupSpec& g, const Rational& r, const ExactElement& a) {
  check_dims(g, a.x.size(), a.t.size());
  if (r <= 0) fail(Errc::domain, "dilation factor must be positive");
  ExactElement d = a;
  for (auto& v : d.x) v *= r;
  for (auto& v : d.t) v *= r * r;
  return d;
}

std::vector<Matrix> structure_constants(const GroupSpec& g) {
  std::vector<Matrix> c;
  for (const auto& u : g.U()) {
    if (u.is_exact())
      c.push_back((u.transpose() - u).scaled(Rational(1, 2)));
    else
      c.push_back((u.transpose() - u).scaled(0.5));
  }
  return c;
}

HTypeReport validate_h_type(const std::vector<Matrix>& U, double tol) {
  HTypeReport rep;
  if (U.empty()) {
    rep.ok = false;
    rep.violations.push_back("no matrices supplied");
    return rep;
  }
  size_t q = U[0].rows();
  for (const auto& u : U) rep.exact = rep.exact && u.is_exact();
  auto zero = [&](const Matrix& a) { return rep.exact ? a.is_zero() : a.is_zero(tol); };
  for (size_t j = 0; j < U.size(); ++j) {
    const Matrix& u = U[j];
    std::string tag = "U[" + std::to_string(j) + "]";
    if (!u.square() || u.rows() != q) {
      rep.ok = false;
      rep.violations.push_back(tag + " has the wrong shape");
      continue;
    }
    Matrix ui = rep.exact ? u : u.inexact();
    if (!zero(ui + ui.transpose())) rep.violations.push_back(tag + " is not skew-symmetric");
    Matrix id = rep.exact ? Matrix::identity(q) : Matrix::identity(q).inexact();
    if (!zero(ui.transpose() * ui - id)) rep.violations.push_back(tag + " is not orthogonal");
  }
  for (size_t i = 0; i < U.size(); ++i)
    for (size_t j = i + 1; j < U.size(); ++j) {
      if (U[i].rows() != q || U[j].rows() != q || !U[i].square() || !U[j].square()) continue;
      Matrix a = rep.exact ? U[i] : U[i].inexact();
      Matrix b = rep.exact ? U[j] : U[j].inexact();
      if (!zero(a * b + b * a))
        rep.violations.push_back("U[" + std::to_string(i) + "] and U[" + std::to_string(j) + "] do not anticommute");
    }
  if (q % 2 != 0) rep.violations.push_back("q must be even for an H-type group");
  rep.ok = rep.violations.empty();
  return rep;
}

namespace builtin {

GroupSpec heisenberg(int d) {
  if (d < 1) fail(Errc::invalid_argument, "heisenberg needs d >= 1");
  int q = 2 * d;
  std::vector<Rational> u(q * q, Rational(0));
  for (int i = 0; i < d; ++i) {
    u[i * q + (d + i)] = 4;
    u[(d + i) * q + i] = -4;
  }
  return GroupSpec(q, 1, {Matrix::from_rationals(q, q, std::move(u))}, "heisenberg");
}

GroupSpec polarized_heisenberg(int d) {
  if (d < 1) fail(Errc::invalid_argument, "polarized_heisenberg needs d >= 1");
  int q = 2 * d;
  std::vector<Rational> u(q * q, Rational(0));
  for (int i = 0; i < d; ++i) u[(d + i) * q + i] = 2;
  return GroupSpec(q, 1, {Matrix::from_rationals(q, q, std::move(u))}, "polarized_heisenberg");
}

GroupSpec h_type(std::vector<Matrix> U) {
  auto rep = validate_h_type(U);
  if (!rep.ok) {
    std::string msg = "not an H-type family:";
    for (const auto& v : rep.violations) msg += " " + v + ";";
    fail(Errc::invalid_argument, msg);
  }
  int q = static_cast<int>(U[0].rows());
  int m = static_cast<int>(U.size());
  return GroupSpec(q, m, std::move(U), "h_type");
}

GroupSpec free_carnot(int q) {
  if (q < 2) fail(Errc::invalid_argument, "free_carnot needs q >= 2");
  std::vector<Matrix> U;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < i; ++j) {
      std::vector<Rational> s(q * q, Rational(0));
      s[i * q + j] = -1;
      s[j * q + i] = 1;
      U.push_back(Matrix::from_rationals(q, q, std::move(s)));
    }
  int m = q * (q - 1) / 2;
  return GroupSpec(q, m, std::move(U), "free_carnot");
}

}  // namespace builtin

}  // namespace nilcount
