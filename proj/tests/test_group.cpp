#include <doctest.h>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "nilcount/group.hpp"

using namespace nilcount;

namespace {

GroupElement el(std::vector<double> x, std::vector<double> t) { return {std::move(x), std::move(t)}; }

bool close(const GroupElement& a, const GroupElement& b, double tol) {
  for (size_t i = 0; i < a.x.size(); ++i)
    if (std::abs(a.x[i] - b.x[i]) > tol * (1 + std::abs(a.x[i]))) return false;
  for (size_t i = 0; i < a.t.size(); ++i)
    if (std::abs(a.t[i] - b.t[i]) > tol * (1 + std::abs(a.t[i]))) return false;
  return true;
}

}  // namespace

TEST_CASE("heisenberg composition") {
  auto H = builtin::heisenberg(1);
  auto r = compose(H, el({1, 0}, {0}), el({0, 1}, {0}));
  CHECK(r == el({1, 1}, {-2}));
  auto g = el({0.3, -1.5}, {2.25});
  CHECK(compose(H, g, identity(H)) == g);
  CHECK(compose(H, identity(H), g) == g);
}

TEST_CASE("polarized heisenberg composition and inverse") {
  auto P = builtin::polarized_heisenberg(1);
  CHECK(compose(P, el({1, 0}, {0}), el({0, 1}, {0})) == el({1, 1}, {1}));
  CHECK(inverse(P, el({1, 1}, {0})) == el({-1, -1}, {1}));
  auto H = builtin::heisenberg(1);
  CHECK(inverse(H, el({1, 0}, {0})) == el({-1, 0}, {0}));
  CHECK(inverse(H, identity(H)) == identity(H));
}

TEST_CASE("dilation") {
  auto H = builtin::heisenberg(1);
  auto g = el({1, 0}, {1});
  CHECK(dilate(H, 1.0, g) == g);
  CHECK(dilate(H, 2.0, g) == el({2, 0}, {4}));
  CHECK_THROWS_AS(dilate(H, 0.0, g), Error);
  CHECK_THROWS_AS(dilate(H, -1.0, g), Error);
}

TEST_CASE("dimension mismatch is rejected") {
  auto H = builtin::heisenberg(1);
  CHECK_THROWS_AS(compose(H, el({1, 0, 0}, {0}), el({0, 1}, {0})), Error);
  CHECK_THROWS_AS(inverse(H, el({1}, {0})), Error);
}

TEST_CASE("structure constants") {
  auto H = builtin::heisenberg(1);
  auto c = structure_constants(H);
  REQUIRE(c.size() == 1);
  CHECK(c[0].exact(0, 1) == Rational(-4));
  CHECK(c[0].exact(1, 0) == Rational(4));
  CHECK(c[0].exact(0, 0) == 0);

  auto F = builtin::free_carnot(3);
  auto cf = structure_constants(F);
  REQUIRE(cf.size() == 3);
  // U^(k) = S(i,j) with -1 at (i,j), +1 at (j,i); pairs (2,1), (3,1), (3,2).
  int pairs[3][2] = {{1, 0}, {2, 0}, {2, 1}};
  for (int k = 0; k < 3; ++k) {
    int i = pairs[k][0], j = pairs[k][1];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        Rational expect = 0;
        if (a == i && b == j) expect = 1;
        if (a == j && b == i) expect = -1;
        CHECK(cf[k].exact(a, b) == expect);
      }
  }
}

TEST_CASE("builtin families") {
  auto H = builtin::heisenberg(1);
  CHECK(H.q() == 2);
  CHECK(H.m() == 1);
  CHECK(H.homogeneous_dimension() == 4);
  CHECK(H.U()[0].exact(0, 1) == 4);
  CHECK(H.U()[0].exact(1, 0) == -4);
  auto H2 = builtin::heisenberg(2);
  CHECK(H2.q() == 4);
  auto F = builtin::free_carnot(3);
  CHECK(F.q() == 3);
  CHECK(F.m() == 3);
  CHECK(builtin::free_carnot(4).m() == 6);
  CHECK_THROWS_AS(builtin::heisenberg(0), Error);
  CHECK_THROWS_AS(GroupSpec(1, 1, {Matrix::identity(1)}), Error);
  CHECK_THROWS_AS(GroupSpec(2, 1, {Matrix::identity(2)}), Error);
}

TEST_CASE("h-type validation") {
  // Normalised 2J: the rotation [[0,1],[-1,0]].
  Matrix J = Matrix::from_rationals(2, 2, {0, 1, -1, 0});
  auto g = builtin::h_type({J});
  CHECK(g.q() == 2);
  CHECK(validate_h_type({J.inexact()}).ok);

  // Quaternionic triple on R^4.
  Matrix I1 = Matrix::from_rationals(4, 4, {0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0});
  Matrix I2 = Matrix::from_rationals(4, 4, {0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0});
  Matrix I3 = Matrix::from_rationals(4, 4, {0, 0, 0, -1, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, 0});
  auto rep = validate_h_type({I1, I2, I3});
  CHECK(rep.ok);
  CHECK(builtin::h_type({I1, I2, I3}).m() == 3);

  auto bad = validate_h_type({J.scaled(Rational(2))});
  CHECK_FALSE(bad.ok);
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].find("orthogonal") != std::string::npos);
  auto sym = validate_h_type({Matrix::identity(2)});
  CHECK_FALSE(sym.ok);
  auto comm = validate_h_type({I1, I1});
  CHECK_FALSE(comm.ok);
  CHECK(comm.violations[0].find("anticommute") != std::string::npos);
  CHECK_THROWS_AS(builtin::h_type({J.scaled(Rational(2))}), Error);
  // Tolerance on doubles.
  Matrix Jn = Matrix::from_doubles(2, 2, {0, 1 + 1e-12, -1, 0});
  CHECK(validate_h_type({Jn}).ok);
  Matrix Jf = Matrix::from_doubles(2, 2, {0, 1 + 1e-6, -1, 0});
  CHECK_FALSE(validate_h_type({Jf}).ok);
}

TEST_CASE("property: associativity, inverses and dilation morphism") {
  std::mt19937_64 rng(11);
  std::vector<GroupSpec> groups = {builtin::heisenberg(1), builtin::heisenberg(2), builtin::polarized_heisenberg(2),
                                   builtin::free_carnot(3), gen::group(rng, 3, 2)};
  for (const auto& G : groups) {
    for (int n = 0; n < 1000; ++n) {
      auto a = gen::exact_element(rng, G.q(), G.m(), 9, 7);
      auto b = gen::exact_element(rng, G.q(), G.m(), 9, 7);
      auto c = gen::exact_element(rng, G.q(), G.m(), 9, 7);
      REQUIRE(compose(G, compose(G, a, b), c) == compose(G, a, compose(G, b, c)));
      REQUIRE(compose(G, a, inverse(G, a)) == exact_identity(G));
      REQUIRE(compose(G, inverse(G, a), a) == exact_identity(G));
      Rational r = gen::rational(rng, 20, 3);
      if (r <= 0) r = -r + 1;
      REQUIRE(dilate(G, r, compose(G, a, b)) == compose(G, dilate(G, r, a), dilate(G, r, b)));

      auto x = gen::element(rng, G.q(), G.m(), 5), y = gen::element(rng, G.q(), G.m(), 5),
           z = gen::element(rng, G.q(), G.m(), 5);
      REQUIRE(close(compose(G, compose(G, x, y), z), compose(G, x, compose(G, y, z)), 1e-12));
      REQUIRE(close(compose(G, x, inverse(G, x)), identity(G), 1e-12));
      double rd = gen::uniform(rng, 1e-3, 10.0);
      REQUIRE(close(dilate(G, rd, compose(G, x, y)), compose(G, dilate(G, rd, x), dilate(G, rd, y)), 1e-12));
    }
    for (const auto& c : structure_constants(G))
      for (size_t i = 0; i < c.rows(); ++i)
        for (size_t j = 0; j < c.cols(); ++j) CHECK(c.exact(i, j) == -c.exact(j, i));
  }
}
