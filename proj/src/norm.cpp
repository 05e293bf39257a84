#include "nilcount/norm.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "nilcount/error.hpp"

namespace nilcount {

NormParams::NormParams(double alpha, Matrix M1, Matrix M2) : alpha_(alpha), M1_(std::move(M1)), M2_(std::move(M2)) {
  if (!(alpha > 0) || !std::isfinite(alpha)) fail(Errc::domain, "alpha must be positive");
  if (!M1_.square() || !M2_.square()) fail(Errc::dimension_mismatch, "M1 and M2 must be square");
  if (M1_.determinant() == 0) fail(Errc::singular, "M1 is singular");
  if (M2_.determinant() == 0) fail(Errc::singular, "M2 is singular");
}

NormParams NormParams::standard(double alpha, int q, int m) {
  return NormParams(alpha, Matrix::identity(q), Matrix::identity(m));
}

double NormParams::abs_det() const { return std::abs(M1_.determinant() * M2_.determinant()); }

bool exact_alpha_supported(double alpha) { return alpha == 1.0 || alpha == 2.0 || alpha == 4.0; }

bool exact_ball_test(double alpha, const Rational& A, const Rational& B, const Rational& C) {
  if (alpha == 2.0) {
    // A + sqrt(B) <= C
    Rational X = C - A;
    return X >= 0 && B <= X * X;
  }
  if (alpha == 4.0) return A * A + B <= C * C;
  if (alpha == 1.0) {
    // sqrt(A) + B^(1/4) <= sqrt(C)  <=>  A <= C and 2 sqrt(AC) + sqrt(B) <= A + C
    //                               <=>  A <= C, W >= 0, 16ABC <= W^2 with W = (A+C)^2 - B - 4AC.
    if (A > C) return false;
    Rational W = (A + C) * (A + C) - B - 4 * A * C;
    return W >= 0 && 16 * A * B * C <= W * W;
  }
  fail(Errc::domain, "exact membership is only available for alpha in {1, 2, 4}");
}

double norm(const NormParams& p, std::span<const double> x, std::span<const double> t) {
  if (x.size() != static_cast<size_t>(p.q()) || t.size() != static_cast<size_t>(p.m()))
    fail(Errc::dimension_mismatch, "element shape does not match the norm");
  double a = std::sqrt(norm2(p.M1().apply(x)));
  double b = std::sqrt(norm2(p.M2().apply(t)));
  double al = p.alpha();
  if (a == 0 && b == 0) return 0;
  return std::pow(std::pow(a, al) + std::pow(b, al / 2), 1 / al);
}

double norm(const NormParams& p, const GroupElement& g) { return norm(p, g.x, g.t); }

bool ball_contains(const NormParams& p, double R, const GroupElement& g, double tol) {
  if (!(R > 0)) fail(Errc::domain, "radius must be positive");
  return norm(p, g) <= R * (1 + tol);
}

bool ball_contains(const NormParams& p, const Radius& R, const ExactElement& g, double tol) {
  if (!(R.value() > 0)) fail(Errc::domain, "radius must be positive");
  if (g.x.size() != static_cast<size_t>(p.q()) || g.t.size() != static_cast<size_t>(p.m()))
    fail(Errc::dimension_mismatch, "element shape does not match the norm");
  if (!p.is_exact() || !exact_alpha_supported(p.alpha())) return ball_contains(p, R.value(), g.approx(), tol);
  Rational A = 0, B = 0;
  for (const auto& v : p.M1().apply_exact(g.x)) A += v * v;
  for (const auto& v : p.M2().apply_exact(g.t)) B += v * v;
  return exact_ball_test(p.alpha(), A, B, R.squared());
}

namespace {

double omega(int n) { return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1); }

}  // namespace

double unit_ball_volume(double alpha, int q, int m) {
  double a = q / alpha, b = 2.0 * m / alpha + 1;
  double beta = std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  return omega(m) * q * omega(q) / alpha * beta;
}

double ball_volume(const NormParams& p, double R) {
  if (!(R > 0)) fail(Errc::domain, "radius must be positive");
  return unit_ball_volume(p.alpha(), p.q(), p.m()) / p.abs_det() * std::pow(R, p.q() + 2 * p.m());
}

MonteCarloVolume ball_volume_monte_carlo(const NormParams& p, std::uint64_t samples, std::uint64_t seed) {
  if (samples < 2) fail(Errc::invalid_argument, "need at least two samples");
  // Sample the box [-1,1]^(q+m) in the coordinates y = M1 x, u = M2 t.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int q = p.q(), m = p.m();
  double al = p.alpha();
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    double a = 0, b = 0;
    for (int i = 0; i < q; ++i) {
      double v = U(rng);
      a += v * v;
    }
    for (int i = 0; i < m; ++i) {
      double v = U(rng);
      b += v * v;
    }
    if (std::pow(a, al / 2) + std::pow(b, al / 4) <= 1) ++hits;
  }
  double box = std::ldexp(1.0, q + m) / p.abs_det();
  double f = static_cast<double>(hits) / samples;
  return {box * f, box * std::sqrt(f * (1 - f) / (samples - 1)), samples};
}

SubadditivityWitness subadditivity_witness(const NormParams& p) {
  if (p.alpha() >= 1) fail(Errc::domain, "the norm is subadditive for alpha >= 1; no witness exists");
  int q = p.q(), m = p.m();
  Matrix M1i = p.M1().inverse(), M2i = p.M2().inverse();
  std::vector<double> eq(q, 0.0), em(m, 0.0);
  eq[q - 1] = 1;
  em[m - 1] = 1;
  SubadditivityWitness w;
  w.g = {M1i.apply(eq), std::vector<double>(m, 0.0)};
  for (double eps = 1e-2; eps >= 1e-12 * 0.999; eps /= 10) {
    std::vector<double> e = em;
    e[m - 1] = eps;
    w.h = {std::vector<double>(q, 0.0), M2i.apply(e)};
    w.eps = eps;
    GroupElement sum{w.g.x, w.h.t};
    w.margin = norm(p, sum) - norm(p, w.g) - norm(p, w.h);
    if (w.margin > 0) return w;
  }
  fail(Errc::convergence, "no subadditivity violation found down to eps = 1e-12");
}

ConvexityWitness convexity_witness(const NormParams& p) {
  double al = p.alpha();
  if (al >= 2) fail(Errc::domain, "the ball is convex for alpha >= 2; no witness exists");
  ConvexityWitness w;
  if (al <= 1) {
    w.s0 = 0.5;
  } else {
    // (1/s + 1)^(al-1) - 2^(al/2) is decreasing in s; bisect for its zero.
    auto h = [al](double s) { return std::pow(1 / s + 1, al - 1) - std::pow(2.0, al / 2); };
    double lo = 1e-300, hi = 1;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
      double mid = 0.5 * (lo + hi);
      (h(mid) > 0 ? lo : hi) = mid;
    }
    w.s0 = 0.5 * (lo + hi);
  }
  w.s = 0.5 * (w.s0 + 1);
  double sp = std::pow(1 - std::pow(w.s, al), 2 / al);
  int q = p.q(), m = p.m();
  Matrix M1i = p.M1().inverse(), M2i = p.M2().inverse();
  std::vector<double> eq(q, 0.0), em(m, 0.0);
  eq[q - 1] = 1;
  em[m - 1] = sp;
  w.a = {M1i.apply(eq), std::vector<double>(m, 0.0)};
  eq[q - 1] = w.s;
  w.b = {M1i.apply(eq), M2i.apply(em)};
  GroupElement mid;
  for (int i = 0; i < q; ++i) mid.x.push_back(0.5 * (w.a.x[i] + w.b.x[i]));
  for (int i = 0; i < m; ++i) mid.t.push_back(0.5 * (w.a.t[i] + w.b.t[i]));
  w.midpoint_norm = norm(p, mid);
  return w;
}

double measure_quasi_constant(const GroupSpec& g, const NormParams& p, int samples, std::uint64_t seed) {
  if (g.q() != p.q() || g.m() != p.m()) fail(Errc::dimension_mismatch, "group and norm dimensions differ");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> scale(-3.0, 3.0);
  auto draw = [&] {
    GroupElement e;
    double r = std::pow(10.0, scale(rng));
    for (int i = 0; i < g.q(); ++i) e.x.push_back(N(rng));
    for (int i = 0; i < g.m(); ++i) e.t.push_back(N(rng));
    return dilate(g, r, e);
  };
  double best = 0;
  for (int s = 0; s < samples; ++s) {
    GroupElement a = draw(), b = draw();
    double den = norm(p, a) + norm(p, b);
    if (den > 0) best = std::max(best, norm(p, compose(g, a, b)) / den);
  }
  return best;
}

}  // namespace nilcount
