#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "generators.hpp"
#include "nilcount/spectral.hpp"

using namespace nilcount;
using std::numbers::pi;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

// Limit of the first-layer formula as |s| -> 0, with the centre fibre
// replaced by its volume and J evaluated by the reference implementation.
double w_axis_limit(double alpha, int q, int m, double lambda1) {
  const double nu = 0.5 * q - 1;
  auto f = [&](double r) {
    const double z = lambda1 * r;
    const double lam = z == 0 ? 1 / (std::pow(2.0, nu) * std::tgamma(nu + 1))
                              : boost::math::cyl_bessel_j(nu, z) / std::pow(z, nu);
    return lam * std::pow(r, q - 1) * std::pow(1 - std::pow(r, alpha), 2.0 * m / alpha);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  double I = 0;
  for (int k = 0; k < 32; ++k) I += ts.integrate(f, k / 32.0, (k + 1) / 32.0, 1e-13);
  const double centre = std::pow(pi, 0.5 * m) / std::tgamma(0.5 * m + 1);
  return std::pow(2 * pi, 0.5 * q) * centre * I;
}

}  // namespace

TEST_CASE("route threshold constant") {
  CHECK(c_alpha(2) == 2);
  CHECK(c_alpha(0.5) == 2);
  CHECK(c_alpha(1) == 2);
  CHECK(c_alpha(1.5) == doctest::Approx(2 * std::pow(0.5, 2.0 / 3)).epsilon(1e-15));
  CHECK(c_alpha(1 + 1e-9) == doctest::Approx(2).epsilon(1e-6));
  CHECK(c_alpha(2 - 1e-9) == doctest::Approx(2).epsilon(1e-6));
  for (double a = 1.01; a < 2; a += 0.01) CHECK(c_alpha(a) < 2);
}

TEST_CASE("zero frequency is the volume on both routes") {
  for (double a : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0})
    for (auto [q, m] : {std::pair{2, 1}, {3, 1}, {4, 1}, {2, 2}, {3, 3}, {6, 2}}) {
      const double vol = unit_ball_volume(a, q, m);
      for (Route r : {Route::first_layer, Route::center}) {
        auto s = fourier_ball(a, q, m, {0, 0, r});
        CHECK(std::abs(s.value.real() - vol) <= 1e-10 * vol);
        CHECK(s.value.imag() == 0);
      }
    }
  CHECK(fourier_ball(2, 2, 1, {0, 0}).value.real() == doctest::Approx(pi).epsilon(1e-13));
}

TEST_CASE("first-layer and centre routes agree") {
  SUBCASE("H^1 grid") {
    for (double a : {0.5, 1.0, 1.5, 2.0, 3.0, 4.0}) {
      double worst = 0;
      for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
          const double l1 = 1 + 49.0 * i / 9, l2 = 1 + 49.0 * j / 9;
          const auto f = fourier_ball(a, 2, 1, {l1, l2, Route::first_layer});
          const auto c = fourier_ball(a, 2, 1, {l1, l2, Route::center});
          worst = std::max(worst, std::abs(f.value - c.value));
        }
      CHECK(worst <= 1e-7);
    }
    CHECK(std::abs(fourier_ball(2, 2, 1, {5, 5, Route::first_layer}).value -
                   fourier_ball(2, 2, 1, {5, 5, Route::center}).value) <= 1e-8);
  }
  SUBCASE("other dimensions") {
    std::mt19937_64 rng(11);
    for (auto [q, m] : {std::pair{3, 1}, {4, 1}, {2, 2}, {3, 2}, {5, 3}})
      for (int k = 0; k < 12; ++k) {
        const double a = gen::uniform(rng, 0.5, 5);
        const double l1 = gen::uniform(rng, 0, 60), l2 = gen::uniform(rng, 0, 60);
        const auto f = fourier_ball(a, q, m, {l1, l2, Route::first_layer});
        const auto c = fourier_ball(a, q, m, {l1, l2, Route::center});
        CHECK(std::abs(f.value - c.value) <= 1e-7);
      }
  }
}

TEST_CASE("auto route follows the threshold") {
  CHECK(fourier_ball(2, 2, 1, {10, 5}).route == Route::first_layer);
  CHECK(fourier_ball(2, 2, 1, {10, 5.01}).route == Route::center);
  CHECK(fourier_ball(1.5, 2, 1, {10, 10 / c_alpha(1.5)}).route == Route::first_layer);
  CHECK(fourier_ball(1.5, 2, 1, {10, 10 / c_alpha(1.5) * 1.001}).route == Route::center);
  CHECK_THROWS_AS(fourier_ball(2, 2, 1, {-1, 0}), Error);
  CHECK_THROWS_AS(fourier_ball(0, 2, 1, {1, 0}), Error);
}

TEST_CASE("w-axis values match the s -> 0 limit formula") {
  for (double a : {1.0, 2.0, 4.0})
    for (double l1 : {0.5, 3.0, 7.5, 20.0, 64.0}) {
      const double lim = w_axis_limit(a, 2, 1, l1);
      const double v = fourier_ball(a, 2, 1, {l1, 1e-6}).value.real();
      CHECK(v == doctest::Approx(lim).epsilon(1e-8).scale(1e-9));
    }
  CHECK(fourier_ball(3, 3, 2, {9.0, 1e-6}).value.real() ==
        doctest::Approx(w_axis_limit(3, 3, 2, 9.0)).epsilon(1e-8).scale(1e-9));
}

TEST_CASE("property: the transform is bounded by the volume") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const double a = gen::uniform(rng, 0.5, 5);
    const int q = 2 + static_cast<int>(rng() % 3), m = 1 + static_cast<int>(rng() % 2);
    const double l1 = std::pow(10.0, gen::uniform(rng, -1, 2.5)), l2 = std::pow(10.0, gen::uniform(rng, -1, 2.5));
    const auto s = fourier_ball(a, q, m, {l1, l2});
    CHECK(std::abs(s.value) <= unit_ball_volume(a, q, m) * (1 + 1e-12));
    CHECK(s.error <= 1e-8);
  }
}

TEST_CASE("scaled and dilated transforms") {
  const double w[] = {0.3, -0.2}, s[] = {0.7};
  auto I = NormParams::standard(2, 2, 1);
  const double lw = 2 * pi * std::hypot(0.3, 0.2), ls = 2 * pi * 0.7;
  CHECK(std::abs(fourier_scaled(I, w, s) - fourier_ball(2, 2, 1, {lw, ls}).value) <= 1e-14);

  // M1 = 2I: 2^-q |det M2|^-1 transform at (w/2, M2^-T s).
  auto M2 = Matrix::from_rationals(1, 1, {Rational(3)});
  NormParams p(4, Matrix::identity(2).scaled(Rational(2)), M2);
  const double expect = std::pow(2.0, -2) / 3 * fourier_ball(4, 2, 1, {lw / 2, ls / 3}).value.real();
  CHECK(fourier_scaled(p, w, s).real() == doctest::Approx(expect).epsilon(1e-12));

  // B_2 as the unit ball of (I/2, I/4), against the dilation identity and the direct oracle.
  for (double a : {1.0, 2.0, 4.0}) {
    NormParams half(a, Matrix::identity(2).scaled(Rational(1, 2)), Matrix::identity(1).scaled(Rational(1, 4)));
    const auto scaled = fourier_scaled(half, w, s);
    const auto dilated = fourier_dilated(NormParams::standard(a, 2, 1), 2, w, s);
    CHECK(std::abs(scaled - dilated) <= 1e-12 * std::abs(dilated) + 1e-13);
    const double w2[] = {0.6, -0.4}, s2[] = {2.8};
    const auto direct = fourier_oracle(a, 2, 1, w2, s2);
    CHECK(std::abs(std::pow(2.0, 4) * direct.value - dilated) <= 16 * direct.error + 1e-9);
  }

  CHECK_THROWS_AS(fourier_scaled(I, std::vector<double>{1.0}, s), Error);
  CHECK_THROWS_AS(fourier_dilated(I, 0, w, s), Error);
}

TEST_CASE("direct oracle") {
  const double zw[] = {0, 0}, zs[] = {0};
  for (double a : {1.0, 2.0, 4.0}) {
    auto o = fourier_oracle(a, 2, 1, zw, zs);
    CHECK(std::abs(o.value.real() - unit_ball_volume(a, 2, 1)) <= o.error + 1e-12);
  }

  struct Point {
    double alpha;
    std::vector<double> w, s;
  };
  const Point pts[] = {
      {2, {1, 0}, {1}},   {2, {0.5, 0.3}, {2}}, {4, {2, 1}, {0.5}},
      {1, {0, 3}, {0.2}}, {3, {1.5, -1}, {3}},
  };
  for (const auto& pt : pts) {
    const auto o = fourier_oracle(pt.alpha, 2, 1, pt.w, pt.s);
    const double lw = 2 * pi * std::hypot(pt.w[0], pt.w[1]), ls = 2 * pi * std::abs(pt.s[0]);
    const auto b = fourier_ball(pt.alpha, 2, 1, {lw, ls});
    CHECK(std::abs(o.value.imag()) <= o.error);
    CHECK(std::abs(o.value - b.value) <= o.error + b.error);
    CHECK(std::abs(o.value - b.value) <= 1e-13);
    CHECK(o.error <= 1e-9);
  }

  // Higher layers exercise the polar-angle product rule.
  const double w3[] = {0.4, 0.1, -0.3}, s2[] = {0.5, 0.2};
  const auto o = fourier_oracle(2.5, 3, 2, w3, s2);
  const auto b = fourier_ball(2.5, 3, 2, {2 * pi * std::sqrt(0.26), 2 * pi * std::sqrt(0.29)});
  CHECK(std::abs(o.value - b.value) <= o.error + b.error);

  const double big[] = {21, 0};
  CHECK_THROWS_AS(fourier_oracle(2, 2, 1, big, zs), Error);
  const double w1[] = {1, 0}, s1[] = {1};
  CHECK_THROWS_AS(fourier_oracle(2, 2, 1, w1, s1, 1000), Error);
}

TEST_CASE("predicted decay exponents") {
  CHECK(predicted_decay(4, 2, 1, {Ray::Kind::w_axis}).exponent == doctest::Approx(-2));
  CHECK(predicted_decay(2, 2, 1, {Ray::Kind::w_axis}).exponent == doctest::Approx(-2.5));
  CHECK(predicted_decay(1, 2, 1, {Ray::Kind::w_axis}).exponent == doctest::Approx(-3));
  CHECK(predicted_decay(3, 2, 1, {Ray::Kind::w_axis}).exponent == doctest::Approx(-1.5 - 2.0 / 3));
  CHECK(predicted_decay(2, 2, 1, {Ray::Kind::s_axis}).exponent == doctest::Approx(-2));
  CHECK(predicted_decay(0.5, 6, 1, {Ray::Kind::s_axis}).exponent == doctest::Approx(-1.25));
  CHECK(predicted_decay(4, 2, 1, {Ray::Kind::s_axis}).exponent == doctest::Approx(-1.5));
  CHECK(predicted_decay(2, 2, 1, {Ray::Kind::fixed_ratio, 1}).exponent == doctest::Approx(-2));
  CHECK(predicted_decay(1.5, 2, 1, {Ray::Kind::fixed_ratio, 1}).exponent == doctest::Approx(-1.5 - 1.0 / 3));
  CHECK_FALSE(predicted_decay(0.5, 2, 1, {Ray::Kind::fixed_ratio, 1}).available);
  CHECK(Ray::parse("fixed-ratio(0.5)").ratio == 0.5);
  CHECK(Ray::parse("diagonal").kind == Ray::Kind::fixed_ratio);
  CHECK_THROWS_AS(Ray::parse("fixed-ratio(x)"), Error);
}

TEST_CASE("envelope fit") {
  std::vector<double> x = log_grid(1, 1000, 200), y;
  for (double v : x) y.push_back(3 * std::pow(v, -1.7) * (1.5 + std::sin(7 * v)));
  auto f = fit_envelope(x, y);
  CHECK(f.status == EnvelopeFit::Status::ok);
  CHECK(f.windows >= 8);
  CHECK(f.slope == doctest::Approx(-1.7).epsilon(0.03));

  std::vector<double> zeros(x.size(), 0.0);
  auto z = fit_envelope(x, zeros);
  CHECK(z.status == EnvelopeFit::Status::zero);
  CHECK(std::isinf(z.slope));
  CHECK(z.slope < 0);

  const double one[] = {5}, val[] = {1};
  CHECK(fit_envelope(one, val).status == EnvelopeFit::Status::undefined);
  const double bad[] = {2, 1}, two[] = {1, 1};
  CHECK_THROWS_AS(fit_envelope(bad, two), Error);
}

TEST_CASE("decay fits on the reference rays") {
  const auto g = log_grid(10, 500, 64);
  auto w = decay_fit(4, 2, 1, {Ray::Kind::w_axis}, g, 4);
  CHECK(w.predicted.exponent == doctest::Approx(-2));
  CHECK(std::abs(w.fit.slope + 2) <= 0.2);
  auto d = decay_fit(2, 2, 1, {Ray::Kind::fixed_ratio, 1}, g, 4);
  CHECK(d.fit.slope <= -2 + 0.2);
  auto s = decay_fit(2, 2, 1, {Ray::Kind::s_axis}, log_grid(10, 1000, 64), 4);
  CHECK(std::abs(s.fit.slope - s.predicted.exponent) <= 0.2);

  CHECK_THROWS_AS(decay_fit(2, 2, 1, {Ray::Kind::w_axis}, log_grid(10, 200, 64)), Error);
  CHECK_THROWS_AS(decay_fit(2, 2, 1, {Ray::Kind::w_axis}, log_grid(10, 1000, 8)), Error);
}

TEST_CASE("decay fit is independent of the worker count") {
  const auto g = log_grid(5, 300, 32);
  auto a = decay_fit(3, 2, 1, {Ray::Kind::s_axis}, g, 1);
  auto b = decay_fit(3, 2, 1, {Ray::Kind::s_axis}, g, 7);
  CHECK(a.magnitude == b.magnitude);
  CHECK(a.fit.slope == b.fit.slope);
}
