#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "generators.hpp"
#include "nilcount/norm.hpp"
#include "oracles.hpp"

using namespace nilcount;

TEST_CASE("norm values") {
  for (double a : {0.5, 1.0, 2.0, 3.0, 4.0}) {
    auto p = NormParams::standard(a, 2, 1);
    CHECK(norm(p, GroupElement{{0, 0}, {1}}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(norm(p, GroupElement{{0, 0}, {0}}) == 0.0);
  }
  CHECK(norm(NormParams::standard(2, 2, 1), GroupElement{{1, 0}, {1}}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(norm(NormParams::standard(4, 2, 1), GroupElement{{1, 0}, {1}}) == doctest::Approx(std::pow(2.0, 0.25)));
  CHECK_THROWS_AS(NormParams(0.0, Matrix::identity(2), Matrix::identity(1)), Error);
  CHECK_THROWS_AS(NormParams(2.0, Matrix::zero(2, 2), Matrix::identity(1)), Error);
  CHECK_THROWS_AS(NormParams(2.0, Matrix::identity(2), Matrix::zero(1, 1)), Error);
}

TEST_CASE("ball membership") {
  auto p = NormParams::standard(2, 2, 1);
  Radius one = Radius::from_rational(1);
  CHECK(ball_contains(p, one, ExactElement{{0, 0}, {0}}));
  CHECK(ball_contains(p, one, ExactElement{{1, 0}, {0}}));
  CHECK_FALSE(ball_contains(p, one, ExactElement{{1, 0}, {1}}));
  CHECK(ball_contains(p, 1.0, GroupElement{{1, 0}, {0}}));
  CHECK_FALSE(ball_contains(p, 1.0, GroupElement{{1, 0}, {1}}));
  // Boundary points that floating point would get wrong in one direction or the other.
  auto p1 = NormParams::standard(1, 2, 1);
  // |x| = 3/5 * ... : x = (3/5, 4/5) has |x| = 1, t = 0 -> on the R = 1 sphere.
  CHECK(ball_contains(p1, one, ExactElement{{Rational(3, 5), Rational(4, 5)}, {0}}));
  // |x| + |t|^(1/2) = 1/2 + 1/2 = 1.
  CHECK(ball_contains(p1, one, ExactElement{{Rational(1, 2), 0}, {Rational(1, 4)}}));
  CHECK_FALSE(ball_contains(p1, one, ExactElement{{Rational(1, 2), 0}, {Rational(1, 4) + Rational(1, 1000000)}}));
  auto p4 = NormParams::standard(4, 2, 1);
  // |x|^4 + |t|^2 = 1 + 9/16 = (5/4)^2 = R^4 for R^2 = 5/4.
  Radius r54 = Radius::sqrt_of(Rational(5, 4));
  CHECK(ball_contains(p4, r54, ExactElement{{1, 0}, {Rational(3, 4)}}));
  CHECK_FALSE(ball_contains(p4, r54, ExactElement{{1, 0}, {Rational(3, 4) + Rational(1, 1000000)}}));
}

TEST_CASE("exact predicate agrees with a 50-digit oracle") {
  std::mt19937_64 rng(5);
  int ties = 0;
  for (double a : {1.0, 2.0, 4.0}) {
    for (int n = 0; n < 4000; ++n) {
      Rational A = gen::rational(rng, 12, 4), B = gen::rational(rng, 12, 4), C = gen::rational(rng, 12, 4);
      if (A < 0) A = -A;
      if (B < 0) B = -B;
      if (C <= 0) C = Rational(1) - C;
      // Bias half of the samples onto the boundary: choose B so the equality holds when possible.
      if (n % 2 == 0) {
        if (a == 2.0 && C >= A) B = (C - A) * (C - A);
        if (a == 4.0 && C * C >= A * A) B = C * C - A * A;
        if (a == 1.0) {
          // sqrt(A) + B^(1/4) = sqrt(C) with A = C/4 * s^2, B = (C (1 - s/2)^2)^2 ... keep rational: C = 4k^2.
          Rational k = gen::rational(rng, 5, 3);
          k = k < 0 ? Rational(1 - k) : Rational(k + 1);
          C = 4 * k * k;
          A = k * k;
          B = k * k * k * k;
        }
      }
      bool e = exact_ball_test(a, A, B, C);
      bool o = oracle::inside(oracle::big(A), oracle::big(B), a, sqrt(oracle::big(C)));
      REQUIRE(e == o);
      if (e && !oracle::inside(oracle::big(A), oracle::big(B), a, sqrt(oracle::big(C)) * (1 - oracle::Big("1e-30"))))
        ++ties;
    }
  }
  CHECK(ties > 1000);
  CHECK_THROWS_AS(exact_ball_test(3.0, 1, 1, 1), Error);
}

TEST_CASE("ball volume") {
  CHECK(std::abs(ball_volume(NormParams::standard(2, 2, 1)) - std::numbers::pi) < 1e-12);
  CHECK(std::abs(ball_volume(NormParams::standard(4, 2, 1)) - std::numbers::pi * std::numbers::pi / 2) < 1e-12);
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    auto p = NormParams::standard(a, 3, 2);
    CHECK(ball_volume(p, 2.0) / ball_volume(p, 1.0) == doctest::Approx(std::pow(2.0, 7)).epsilon(1e-13));
  }
  auto scaled = NormParams(2, Matrix::identity(2).scaled(Rational(2)), Matrix::identity(1));
  CHECK(ball_volume(scaled) == doctest::Approx(std::numbers::pi / 4));
  CHECK_THROWS_AS(ball_volume(NormParams::standard(2, 2, 1), 0.0), Error);
}

TEST_CASE("monte carlo volume oracle") {
  for (double a : {1.0, 2.0, 4.0, 0.7}) {
    auto p = NormParams(a, Matrix::from_rationals(2, 2, {2, 1, 0, 1}), Matrix::from_rationals(1, 1, {Rational(3, 2)}));
    auto mc = ball_volume_monte_carlo(p, 1'000'000, 17);
    CHECK(std::abs(mc.estimate - ball_volume(p)) <= 3 * mc.std_error);
  }
}

TEST_CASE("subadditivity witness") {
  for (double a : {0.5, 0.9, 0.3}) {
    auto p = NormParams::standard(a, 2, 1);
    auto w = subadditivity_witness(p);
    CHECK(w.margin > 0);
    GroupElement s{w.g.x, w.h.t};
    CHECK(norm(p, s) > norm(p, w.g) + norm(p, w.h));
    CHECK(w.eps <= 1e-2);
  }
  auto w9 = subadditivity_witness(NormParams::standard(0.9, 2, 1));
  auto p9 = NormParams::standard(0.9, 2, 1);
  GroupElement h6{{0, 0}, {1e-6}}, g6{{0, 1}, {0}}, s6{{0, 1}, {1e-6}};
  CHECK(norm(p9, s6) - norm(p9, g6) - norm(p9, h6) > 0);
  CHECK(w9.margin > 0);
  auto pm = NormParams(0.5, Matrix::from_rationals(2, 2, {3, 1, 1, 2}), Matrix::from_rationals(1, 1, {5}));
  CHECK(subadditivity_witness(pm).margin > 0);
  CHECK_THROWS_AS(subadditivity_witness(NormParams::standard(1.0, 2, 1)), Error);
  CHECK_THROWS_AS(subadditivity_witness(NormParams::standard(2.0, 2, 1)), Error);
}

TEST_CASE("convexity witness") {
  auto w15 = convexity_witness(NormParams::standard(1.5, 2, 1));
  CHECK(std::pow(1 / w15.s0 + 1, 0.5) == doctest::Approx(std::pow(2.0, 0.75)).epsilon(1e-12));
  CHECK(w15.midpoint_norm > 1);
  auto w1 = convexity_witness(NormParams::standard(1.0, 2, 1));
  CHECK(w1.s0 == 0.5);
  CHECK(w1.midpoint_norm > 1);
  for (double a : {0.3, 0.5, 1.0, 1.2, 1.5, 1.9, 1.99}) {
    auto p = NormParams(a, Matrix::from_rationals(2, 2, {2, 1, 0, 1}), Matrix::from_rationals(1, 1, {3}));
    auto w = convexity_witness(p);
    CHECK(norm(p, w.a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm(p, w.b) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.midpoint_norm > 1);
    CHECK(w.s > w.s0);
    CHECK(w.s < 1);
  }
  CHECK_THROWS_AS(convexity_witness(NormParams::standard(2.0, 2, 1)), Error);
}

TEST_CASE("property: homogeneity, subadditivity, convexity, quasi-triangle") {
  std::mt19937_64 rng(23);
  auto H = builtin::heisenberg(1);
  for (double a : {0.5, 1.0, 1.5, 2.0, 3.0, 4.0}) {
    auto p = NormParams(a, gen::double_matrix(rng, 2, -2, 2), gen::double_matrix(rng, 1, 0.5, 2));
    for (int n = 0; n < 2000; ++n) {
      auto g = gen::element(rng, 2, 1, 3);
      double r = gen::uniform(rng, 0.01, 10);
      REQUIRE(norm(p, dilate(H, r, g)) == doctest::Approx(r * norm(p, g)).epsilon(1e-12));
    }
    if (a >= 1)
      for (int n = 0; n < 10000; ++n) {
        auto g = gen::element(rng, 2, 1, 3), h = gen::element(rng, 2, 1, 3);
        GroupElement s{{g.x[0] + h.x[0], g.x[1] + h.x[1]}, {g.t[0] + h.t[0]}};
        REQUIRE(norm(p, s) <= norm(p, g) + norm(p, h) + 1e-12);
      }
    if (a >= 2)
      for (int n = 0; n < 2000; ++n) {
        auto g = gen::element(rng, 2, 1, 3), h = gen::element(rng, 2, 1, 3);
        g = dilate(H, 1 / norm(p, g), g);
        h = dilate(H, 1 / norm(p, h), h);
        GroupElement mid{{(g.x[0] + h.x[0]) / 2, (g.x[1] + h.x[1]) / 2}, {(g.t[0] + h.t[0]) / 2}};
        REQUIRE(norm(p, mid) <= 1 + 1e-12);
      }
  }
  for (const auto& G : {builtin::heisenberg(1), builtin::polarized_heisenberg(1), builtin::free_carnot(3)})
    for (double a : {1.0, 2.0, 4.0}) {
      double c0 = measure_quasi_constant(G, NormParams::standard(a, G.q(), G.m()), 20000, 3);
      CHECK(c0 > 0.5);
      CHECK(c0 <= 10.0);
    }
}
