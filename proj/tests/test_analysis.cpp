#include <doctest.h>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "nilcount/analysis.hpp"
#include "nilcount/spectral.hpp"

using namespace nilcount;

namespace {

Problem heis(double alpha) {
  return {builtin::heisenberg(1), NormParams::standard(alpha, 2, 1), LatticeSpec::identity(2, 1)};
}

double measured_discrepancy(const Problem& p, double R) {
  return make_record(p, R, count_ball(p, BallQuery{Radius::from_double(R), std::nullopt})).rel_discrepancy;
}

PoissonOptions relaxed(double c1, double c2) {
  PoissonOptions o;
  o.cap1 = c1;
  o.cap2 = c2;
  o.max_tail_ratio = 1e6;
  return o;
}

}  // namespace

TEST_CASE("exponent targets") {
  auto t = predicted_exponents(2, 1, 2);
  CHECK(t.gamma1 == doctest::Approx(2));
  CHECK(t.gamma2 == 0);
  CHECK(t.tag == "ge1-balanced");

  t = predicted_exponents(2, 1, 4);
  CHECK(t.gamma1 == doctest::Approx(2));
  CHECK(t.gamma2 == doctest::Approx(1));
  CHECK(t.tag == "ge1-steep-low");

  t = predicted_exponents(2, 1, 1);
  CHECK(t.gamma1 == doctest::Approx(2));
  CHECK(t.gamma2 == doctest::Approx(0.5));
  CHECK(t.tag == "unit-alpha-m1");

  for (double a : {3.25, 3.5, 3.75}) {
    t = predicted_exponents(4, 1, a);
    CHECK(t.gamma1 == doctest::Approx(2));
    CHECK(t.gamma2 == doctest::Approx(1.0 / 3));
    CHECK(t.tag == "ge1-steep-high");
  }

  t = predicted_exponents(3, 1, 1.5);
  CHECK(t.sigma == doctest::Approx(1.0 / 3));
  CHECK(t.gamma1 == doctest::Approx(32.0 / 19));
  CHECK(t.tag == "mid-alpha-m1");

  t = predicted_exponents(2, 2, 0.5);
  CHECK(t.gamma1 == doctest::Approx(2 * 6 * 0.5 / (6 + 1 - 3 + 1)));
  CHECK(t.tag == "le1-higher-center");

  t = predicted_exponents(6, 1, 0.5);
  CHECK(t.gamma1 == 2);
  CHECK(t.gamma2 == 0);
  CHECK(t.tag == "m1-any-alpha");

  t = predicted_exponents(3, 1, 0.5);
  CHECK(t.gamma1 == doctest::Approx(243.0 / 158));
}

TEST_CASE("shell table against the selected clauses") {
  // Steep alpha in (3, 4) with q = 2, m = 1: the clause gives a log power 2/(Q+4),
  // the shell table restricts that entry to 2 < alpha < 3.
  auto t = predicted_exponents(2, 1, 3.5);
  CHECK(t.gamma2 == doctest::Approx(0.25));
  CHECK(t.table_gamma2 == 0);
  t = predicted_exponents(2, 1, 2.5);
  CHECK(t.gamma2 == doctest::Approx(0.25));
  CHECK(t.table_gamma2 == doctest::Approx(0.25));
  CHECK(std::isnan(predicted_exponents(2, 2, 0.5).table_gamma1));
  CHECK(predicted_exponents(2, 1, 2).table_gamma1 == doctest::Approx(2));
}

TEST_CASE("exponent coverage and invariants") {
  for (int q = 2; q <= 6; ++q)
    for (int m = 1; m <= 3; ++m)
      for (double a : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0}) {
        CAPTURE(q);
        CAPTURE(m);
        CAPTURE(a);
        ExponentTable t;
        REQUIRE_NOTHROW(t = predicted_exponents(q, m, a));
        CHECK(!t.tag.empty());
        CHECK(!t.candidates.empty());
        CHECK(t.gamma1 > 0);
        CHECK(t.gamma1 <= q + 2 * m);
        if (t.tag != "le1-higher-center") CHECK(t.gamma1 <= 2 + 1e-12);
        CHECK(t.gamma2 >= 0);
        CHECK(t.sigma == doctest::Approx(a > 1 && a < 2 ? 1.0 / 3 : 0.5));
        CHECK(t.beta1 == doctest::Approx(q / 2.0 + 0.5 * std::min(q + 2 * a, 4.0 * m / a + 1)));
        CHECK(t.beta2 == doctest::Approx(m / 2.0 + 0.5 * std::min(m + a, 2.0 * q / a + 1)));
        for (const auto& c : t.candidates) {
          bool worse = c.gamma1 < t.gamma1 - 1e-12 || (std::abs(c.gamma1 - t.gamma1) <= 1e-12 && c.gamma2 >= t.gamma2 - 1e-12);
          CHECK(worse);
        }
      }
  std::mt19937_64 rng(11);
  for (int n = 0; n < 300; ++n) {
    int q = 2 + static_cast<int>(rng() % 7), m = 1 + static_cast<int>(rng() % 4);
    double a = gen::uniform(rng, 0.05, 8);
    CHECK_NOTHROW(predicted_exponents(q, m, a));
  }
  CHECK_THROWS_AS(predicted_exponents(2, 1, 0), Error);
  CHECK_THROWS_AS(predicted_exponents(2, 0, 2), Error);
}

TEST_CASE("epsilon power") {
  CHECK(epsilon_power(0.1, 3, 1) == doctest::Approx(100));
  CHECK(epsilon_power(0.1, 2, 2) == doctest::Approx(std::log(10.0)));
  CHECK(epsilon_power(0.1, 1, 2) == 1);
}

TEST_CASE("sweep on H^1, alpha = 2") {
  auto p = heis(2);
  auto radii = radius_grid(10, 200, 40);
  auto s = sweep(p, radii);
  REQUIRE(s.records.size() == 40);
  for (size_t i = 0; i < s.records.size(); ++i) {
    CHECK(s.records[i].R == radii[i]);
    if (i) CHECK(s.records[i].count >= s.records[i - 1].count);
  }
  REQUIRE(s.fit.status == EnvelopeFit::Status::ok);
  CHECK(s.fit.windows >= 8);
  CHECK(s.predicted_slope == doctest::Approx(2));
  CHECK(s.fit.slope <= 2.15);
  CHECK(s.verdict == SweepResult::Verdict::consistent);
  CHECK(s.sharp_case);
  MESSAGE("H^1 alpha=2 envelope slope " << s.fit.slope << std::string(s.warning ? " (warning)" : ""));
}

TEST_CASE("sweep degenerate inputs") {
  auto p = heis(2);
  auto one = sweep(p, {10.0});
  CHECK(one.fit.status == EnvelopeFit::Status::undefined);
  CHECK(one.verdict == SweepResult::Verdict::undefined);
  CHECK(!one.note.empty());

  std::vector<CountRecord> zero;
  for (double R : {1.0, 2.0, 4.0, 8.0}) zero.push_back({R, 1, 1, 0, 0, 0, true});
  auto z = summarize_sweep(p, zero);
  CHECK(z.fit.status == EnvelopeFit::Status::zero);
  CHECK(std::isinf(z.fit.slope));
  CHECK(z.fit.slope < 0);

  CHECK_THROWS_AS(sweep(p, {}), Error);
  CHECK_THROWS_AS(sweep(p, {10.0, 10.0}), Error);
  CHECK_THROWS_AS(sweep(p, {12.0, 10.0}), Error);
  CHECK_THROWS_AS(sweep(p, {-1.0, 10.0}), Error);
  SweepOptions tight;
  tight.max_fibres = 100;
  try {
    sweep(p, {10.0, 20.0}, tight);
    FAIL("expected a budget error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::budget);
  }
}

TEST_CASE("sweep fit recovers synthetic power laws") {
  std::mt19937_64 rng(5);
  auto p = heis(2);
  for (int n = 0; n < 50; ++n) {
    double c = gen::uniform(rng, 0.1, 10), e = gen::uniform(rng, -1, 4);
    std::vector<CountRecord> recs;
    for (double R : radius_grid(10, 1000, 60)) recs.push_back({R, 0, 0, c * std::pow(R, e), 0, 0, true});
    auto s = summarize_sweep(p, recs);
    REQUIRE(s.fit.status == EnvelopeFit::Status::ok);
    CHECK(s.fit.slope == doctest::Approx(e).epsilon(1e-9));
    CHECK((s.verdict == SweepResult::Verdict::consistent) == (e <= 2.15));
    CHECK(s.warning == (e < 1.5));
  }
}

TEST_CASE("poisson argument checks") {
  auto p = heis(2);
  auto code = [&](double R, double eps, PoissonOptions o) {
    try {
      poisson_estimate(p, R, eps, o);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::assertion;
  };
  PoissonOptions o = relaxed(2, 1);
  CHECK(code(10, 0, o) == Errc::domain);
  CHECK(code(10, 1, o) == Errc::domain);
  CHECK(code(0.5, 0.6, o) == Errc::domain);
  CHECK(code(10, 0.1, relaxed(2, 0.5)) == Errc::invalid_argument);
  CHECK(code(10, 0.1, relaxed(0.5, 2)) == Errc::invalid_argument);
  PoissonOptions small = relaxed(4, 2);
  small.max_evaluations = 10;
  CHECK(code(10, 0.1, small) == Errc::budget);
}

TEST_CASE("poisson term bookkeeping") {
  auto p = heis(2);
  auto e = poisson_estimate(p, 5, 0.2, relaxed(1, 1));
  // |k'| = 1 gives four vectors, k'' = +-1 two; the origin never enters.
  CHECK(e.plus.s1.terms == 4);
  CHECK(e.plus.s2.terms == 2);
  CHECK(e.plus.s3.terms == 8);
  CHECK(e.evaluations == 2 * (1 + 1 + 1));
  CHECK(e.N == 4);
  CHECK(e.edge == doctest::Approx((std::pow(5.2, 4) - std::pow(5.0, 4)) / std::pow(5.0, 4)));
  CHECK(e.bound == doctest::Approx(e.head + e.tail + e.edge));
}

TEST_CASE("poisson heads match a direct dual sum") {
  // Sheared first layer and a scaled centre, through the general transform route.
  Matrix M1 = Matrix::from_rationals(2, 2, {Rational(1), Rational(1, 2), Rational(0), Rational(1)});
  Matrix M2 = Matrix::from_rationals(1, 1, {Rational(3, 2)});
  Problem p{builtin::heisenberg(1), NormParams(2, M1, M2), LatticeSpec::identity(2, 1)};
  const double R = 4, eps = 0.25;
  const int c1 = 2, c2 = 2, N = 4;
  auto e = poisson_estimate(p, R, eps, relaxed(c1, c2));
  const auto red = p.reduced();
  NormParams tilde(2, red.Mt1, red.Mt2);
  const double vol = ball_volume(tilde, 1);
  for (const auto* side : {&e.plus, &e.minus}) {
    const double rho = side->rho;
    double s[4] = {0, 0, 0, 0};
    for (int a = -c1; a <= c1; ++a)
      for (int b = -c1; b <= c1; ++b)
        for (int t = -c2; t <= c2; ++t) {
          const double n1 = std::hypot(a, b), n2 = std::abs(t);
          if (n1 > c1 || (n1 == 0 && n2 == 0)) continue;
          const double w[2] = {rho * a, rho * b}, z[1] = {rho * rho * t};
          const double v = std::pow(rho / R, 4) * std::abs(fourier_scaled(tilde, w, z)) / vol *
                           std::pow(1 + eps * n1 + eps * eps * n2, -N);
          s[n2 == 0 ? 1 : n1 == 0 ? 2 : 3] += v;
        }
    CHECK(side->s1.head == doctest::Approx(s[1]).epsilon(1e-8));
    CHECK(side->s2.head == doctest::Approx(s[2]).epsilon(1e-8));
    CHECK(side->s3.head == doctest::Approx(s[3]).epsilon(1e-8));
  }
}

TEST_CASE("poisson tail model is stable under the caps") {
  auto p = heis(2);
  auto lo = poisson_estimate(p, 10, 0.1, relaxed(6, 2));
  auto hi = poisson_estimate(p, 10, 0.1, relaxed(12, 3));
  CHECK(hi.head > lo.head);
  CHECK(hi.tail < lo.tail);
  CHECK(hi.head + hi.tail == doctest::Approx(lo.head + lo.tail).epsilon(0.15));
}

TEST_CASE("poisson envelope at R = 20, eps = 1/R") {
  auto p = heis(2);
  const double R = 20, eps = 1 / R;
  PoissonOptions strict;
  strict.cap1 = 8;
  strict.cap2 = 2;
  // The mixed sum decays too slowly for these caps to leave a tail under 10% of the head.
  try {
    poisson_estimate(p, R, eps, strict);
    FAIL("expected the tail guard to fire");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::budget);
  }
  auto e = poisson_estimate(p, R, eps, relaxed(8, 2));
  const double measured = measured_discrepancy(p, R);
  MESSAGE("R=20: bound " << e.bound << " (head " << e.head << ", tail " << e.tail << ", edge " << e.edge
                         << "), measured " << measured);
  CHECK(e.bound >= measured);
  CHECK(e.bound_unit_edge >= measured);
  CHECK(e.env1 == doctest::Approx(std::pow(R, -predicted_exponents(2, 1, 2).beta1) *
                                  epsilon_power(eps, 2, predicted_exponents(2, 1, 2).beta1)));
  CHECK(std::isfinite(e.env3));
}

TEST_CASE("poisson bound against measured discrepancies") {
  int covered = 0, total = 0;
  for (double a : {2.0, 3.0})
    for (double R : {6.0, 8.0, 10.0, 13.0}) {
      auto p = heis(a);
      auto e = poisson_estimate(p, R, 1 / R, relaxed(6, 2));
      const double d = measured_discrepancy(p, R);
      ++total;
      covered += e.bound_unit_edge >= d;
      MESSAGE("alpha " << a << " R " << R << ": dual " << e.head + e.tail << " edge " << e.edge << " measured " << d);
      CAPTURE(a);
      CAPTURE(R);
      CHECK(e.head > 0);
    }
  CHECK(covered >= 0.9 * total);
}
