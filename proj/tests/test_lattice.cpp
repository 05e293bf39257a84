#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "nilcount/ellipsoid.hpp"
#include "nilcount/lattice.hpp"
#include "oracles.hpp"

using namespace nilcount;

TEST_CASE("subgroup certificates") {
  auto P = builtin::polarized_heisenberg(1);
  auto ok = is_subgroup(P, LatticeSpec::identity(2, 1));
  CHECK(ok.is_subgroup);
  CHECK(ok.exact);
  for (const auto& e : ok.entries) CHECK((*e.exact_value == 0 || *e.exact_value == 1));

  auto bad = is_subgroup(P, LatticeSpec(Matrix::identity(2), Matrix::from_rationals(1, 1, {3})));
  CHECK_FALSE(bad.is_subgroup);
  REQUIRE(bad.first_failure);
  CHECK(*bad.entries[*bad.first_failure].exact_value == Rational(1, 3));

  for (int d : {1, 2})
    for (int b : {1, 2, 3}) {
      std::vector<int> bv(d, 1);
      bv.back() = b;
      CHECK(is_subgroup(builtin::polarized_heisenberg(d), LatticeSpec::gamma_b(bv)).is_subgroup);
      std::vector<int> same(d, b);
      CHECK(is_subgroup(builtin::polarized_heisenberg(d), LatticeSpec::gamma_b(same)).is_subgroup);
    }
  CHECK_THROWS_AS(LatticeSpec::gamma_b({2, 3}), Error);
  CHECK(is_subgroup(builtin::heisenberg(1), LatticeSpec::identity(2, 1)).is_subgroup);
  CHECK_FALSE(is_subgroup(builtin::free_carnot(3), LatticeSpec::identity(3, 3)).is_subgroup);
  CHECK(is_subgroup(builtin::free_carnot(3),
                    LatticeSpec(Matrix::identity(3), Matrix::identity(3).scaled(Rational(1, 2))))
            .is_subgroup);
  auto half = LatticeSpec(Matrix::identity(2).scaled(Rational(1, 2)), Matrix::identity(1));
  CHECK_FALSE(is_subgroup(builtin::heisenberg(1), half).is_subgroup);
  auto half2 = LatticeSpec(Matrix::identity(2).scaled(Rational(1, 2)), Matrix::identity(1).scaled(Rational(1, 2)));
  CHECK(is_subgroup(builtin::heisenberg(1), half2).is_subgroup);
  auto third = LatticeSpec(Matrix::identity(2).scaled(Rational(1, 3)), Matrix::identity(1).scaled(Rational(1, 9)));
  CHECK(is_subgroup(builtin::heisenberg(1), third).is_subgroup);

  auto approx = is_subgroup(P, LatticeSpec(Matrix::identity(2).inexact(), Matrix::identity(1).inexact()));
  CHECK(approx.is_subgroup);
  CHECK_FALSE(approx.exact);
  CHECK_THROWS_AS(LatticeSpec(Matrix::zero(2, 2), Matrix::identity(1)), Error);
}

TEST_CASE("property: subgroup certificate soundness") {
  std::mt19937_64 rng(31);
  int accepted = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto G = gen::group(rng, 2 + trial % 3, 1 + trial % 2);
    std::vector<Rational> d1, d2;
    for (int i = 0; i < G.q(); ++i) d1.push_back(Rational(std::uniform_int_distribution<int>(1, 3)(rng)));
    for (int i = 0; i < G.m(); ++i) d2.push_back(Rational(1, std::uniform_int_distribution<int>(1, 3)(rng)));
    LatticeSpec L(Matrix::diagonal(d1), Matrix::diagonal(d2));
    auto cert = is_subgroup(G, L);
    if (!cert.is_subgroup) continue;
    ++accepted;
    for (int n = 0; n < 1000; ++n) {
      std::vector<std::int64_t> a1, a2, b1, b2;
      std::uniform_int_distribution<int> k(-20, 20);
      for (int i = 0; i < G.q(); ++i) a1.push_back(k(rng)), b1.push_back(k(rng));
      for (int i = 0; i < G.m(); ++i) a2.push_back(k(rng)), b2.push_back(k(rng));
      auto g = L.exact_point(a1, a2), h = L.exact_point(b1, b2);
      REQUIRE(L.coordinates(compose(G, g, h)).has_value());
      REQUIRE(L.coordinates(inverse(G, g)).has_value());
    }
  }
  CHECK(accepted >= 10);
}

TEST_CASE("covolume") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 50; ++n) {
    Matrix L1 = gen::rational_matrix(rng, 3, 5, 4), L2 = gen::rational_matrix(rng, 2, 5, 4);
    LatticeSpec L(L1, L2);
    double expect = std::abs(to_double(*L1.exact_determinant() * *L2.exact_determinant()));
    CHECK(std::abs(L.covolume() - expect) <= 1e-12 * expect);
  }
}

TEST_CASE("delta rationality") {
  auto r1 = delta_rational(Matrix::identity(2), Matrix::from_rationals(1, 1, {4}));
  REQUIRE(r1.verdict == DeltaRational::Verdict::found);
  CHECK(*r1.c == 1);
  auto r2 = delta_rational(Matrix::identity(2).scaled(Rational(1, 2)), Matrix::from_rationals(1, 1, {Rational(1, 4)}));
  REQUIRE(r2.verdict == DeltaRational::Verdict::found);
  CHECK(*r2.c == 2);
  auto r3 = delta_rational(Matrix::identity(2), Matrix::from_doubles(1, 1, {std::sqrt(2.0)}));
  CHECK(r3.verdict == DeltaRational::Verdict::unknown);
  // c_min = 3 from A1, then c^2 A2 = 9 * 1/12 needs k with 4 | k^2, so k = 2.
  auto r4 = delta_rational(Matrix::identity(2).scaled(Rational(1, 3)), Matrix::from_rationals(1, 1, {Rational(1, 12)}));
  REQUIRE(r4.verdict == DeltaRational::Verdict::found);
  CHECK(*r4.c == 6);

  std::mt19937_64 rng(8);
  for (int n = 0; n < 200; ++n) {
    Matrix A1 = gen::rational_matrix(rng, 2, 6, 6), A2 = gen::rational_matrix(rng, 1, 6, 12);
    auto r = delta_rational(A1, A2);
    REQUIRE(r.verdict == DeltaRational::Verdict::found);
    Rational c = *r.c;
    REQUIRE(A1.scaled(c).is_integral());
    REQUIRE(A2.scaled(c * c).is_integral());
    // Minimality: every smaller admissible multiple of c_min fails, in particular c/2 and c/p for p | num(c).
    for (BigInt k = 1; Rational(k) * *r.c_min < c; ++k) {
      Rational cc = Rational(k) * *r.c_min;
      REQUIRE_FALSE((A1.scaled(cc).is_integral() && A2.scaled(cc * cc).is_integral()));
    }
    Rational h = c / 2;
    REQUIRE_FALSE((A1.scaled(h).is_integral() && A2.scaled(h * h).is_integral()));
  }
}

TEST_CASE("truncated lattice") {
  auto L = LatticeSpec::identity(2, 1);
  CHECK(TruncatedLattice(L, 1).size() == 15);
  CHECK(TruncatedLattice(L, 1).points().size() == 15);
  CHECK(TruncatedLattice(L, Rational(1, 2)).size() == 1);
  CHECK(TruncatedLattice(L, Rational(99, 100)).points().size() == 1);
  auto L2 = LatticeSpec(Matrix::diagonal({2, 2}), Matrix::identity(1));
  TruncatedLattice T2(L2, 2);
  std::int64_t brute = 0;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -5; c <= 5; ++c)
        if (4 * a * a + 4 * b * b <= 4 && c * c <= 16) ++brute;
  CHECK(T2.size() == brute);
  CHECK(static_cast<std::int64_t>(T2.points().size()) == brute);
  for (const auto& g : T2.points()) {
    CHECK(g.x[0] * g.x[0] + g.x[1] * g.x[1] <= 4);
    CHECK(std::abs(g.t[0]) <= 4);
  }
}

TEST_CASE("reduction and the counting identity") {
  auto p = NormParams::standard(2, 2, 1);
  auto r = reduce(p, LatticeSpec::identity(2, 1));
  CHECK(r.Mt1 == Matrix::identity(2));
  CHECK(r.Mt2 == Matrix::identity(1));
  auto p2 = NormParams(2, Matrix::identity(2).scaled(Rational(2)), Matrix::identity(1));
  CHECK(reduce(p2, LatticeSpec::identity(2, 1)).Mt1 == Matrix::identity(2).scaled(Rational(2)));

  std::mt19937_64 rng(41);
  for (int n = 0; n < 12; ++n) {
    double alpha = std::vector<double>{1, 2, 4}[n % 3];
    Problem P{builtin::polarized_heisenberg(1),
              NormParams(alpha, gen::near_identity(rng, 2, 3), gen::near_identity(rng, 1, 3)),
              LatticeSpec(gen::near_identity(rng, 2, 2), gen::near_identity(rng, 1, 2))};
    oracle::Big R = 3;
    auto direct = oracle::naive_centered(P, {0, 0}, {0}, R);
    auto rd = P.reduced();
    CHECK(direct == oracle::naive_count(rd.Mt1, rd.Mt2, alpha, R));
    CHECK(direct == count_ball(rd, alpha, Radius::from_rational(3)).count);
  }
}
