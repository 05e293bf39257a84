#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "nilcount/config.hpp"

using namespace nilcount;

namespace {

Errc code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::assertion;
}

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal H^1 config") {
  auto c = parse_config(R"({"group":{"builtin":"heisenberg","d":1},"norm":{"alpha":2},"lattice":"identity"})");
  auto p = c.problem();
  CHECK(p.group.q() == 2);
  CHECK(p.group.m() == 1);
  CHECK(p.alpha() == 2);
  CHECK(p.norm.M1() == Matrix::identity(2));
  CHECK(p.norm.M2() == Matrix::identity(1));
  CHECK(p.lattice.is_identity());
  CHECK(c.alpha_exact == Rational(2));
  CHECK(c.run.workers == 1);
}

TEST_CASE("exact rational entries") {
  auto c = parse_config(R"({"group":{"builtin":"heisenberg","d":1},
    "norm":{"alpha":"3/2","M1":[["1/3",0],[0,1]],"M2":[[2]]}})");
  REQUIRE(c.M1);
  CHECK(c.M1->is_exact());
  CHECK(c.M1->exact(0, 0) == Rational(1, 3));
  CHECK(c.alpha == 1.5);
  CHECK(*c.alpha_exact == Rational(3, 2));
  const auto text = serialize_config(c);
  CHECK(text.find("\"1/3\"") != std::string::npos);
  CHECK(text.find("\"3/2\"") != std::string::npos);
  CHECK(parse_config(text) == c);

  auto f = parse_config(R"({"group":{"builtin":"heisenberg","d":1},"norm":{"alpha":2.5,"M1":[[0.5,0],[0,1]]}})");
  CHECK(!f.M1->is_exact());
  CHECK(!f.alpha_exact);
  CHECK(parse_config(serialize_config(f)) == f);
  // Decimal strings are exact.
  auto d = parse_config(R"({"group":{"builtin":"heisenberg","d":1},"norm":{"M1":[["0.1",0],[0,1]]}})");
  CHECK(d.M1->exact(0, 0) == Rational(1, 10));
}

TEST_CASE("schema errors name the field") {
  const std::string h = R"("group":{"builtin":"heisenberg","d":1})";
  CHECK(code_of("{" + h + R"(,"norm":{"M1":[[1,0,0],[0,1,0]]}})") == Errc::schema);
  CHECK(message_of("{" + h + R"(,"norm":{"M1":[[1,0,0],[0,1,0]]}})").find("norm.M1") != std::string::npos);
  CHECK(code_of("{" + h + R"(,"norm":{"M1":[[1,0,0],[0,1,0],[0,0,1]]}})") == Errc::dimension_mismatch);
  CHECK(code_of("{" + h + R"(,"norm":{"M1":[[1,1],[1,1]]}})") == Errc::singular);
  CHECK(code_of("{" + h + R"(,"norm":{"alpha":-1}})") == Errc::schema);
  CHECK(code_of("{" + h + R"(,"norm":{"M1":[[1,"x"],[0,1]]}})") == Errc::schema);
  CHECK(message_of("{" + h + R"(,"norm":{"M1":[[1,"x"],[0,1]]}})").find("norm.M1[0][1]") != std::string::npos);
  CHECK(code_of("{" + h + R"(,"norm":{"aplha":2}})") == Errc::schema);
  CHECK(message_of("{" + h + R"(,"norm":{"aplha":2}})").find("norm.aplha") != std::string::npos);
  CHECK(code_of(R"({"group":{"builtin":"nope","d":1}})") == Errc::schema);
  CHECK(code_of(R"({"norm":{"alpha":2}})") == Errc::schema);
  CHECK(code_of(R"({"group":{"q":2,"m":1,"U":[[[0,1,0],[-1,0,0],[0,0,0]]]}})") == Errc::schema);
  CHECK(message_of(R"({"group":{"q":2,"m":1,"U":[[[0,1,0],[-1,0,0],[0,0,0]]]}})").find("group.U[0]") !=
        std::string::npos);
  CHECK(code_of("{" + h + R"(,"lattice":{"L1":[[1,0],[0,1]],"L2":[[0]]}})") == Errc::singular);
  CHECK(code_of("{" + h + R"(,"lattice":{"gamma_b":[1,2]}})") == Errc::dimension_mismatch);
  CHECK(code_of("{" + h + R"(,"run":{"workers":0}})") == Errc::schema);
  CHECK(code_of("{" + h + ",") == Errc::schema);
  CHECK(code_of("/nonexistent/config.json") == Errc::io);
}

TEST_CASE("other group and lattice forms") {
  auto c = parse_config(R"({"group":{"builtin":"polarized_heisenberg","d":2},"norm":{"alpha":4},
    "lattice":{"gamma_b":[1,3]},"run":{"workers":3,"seed":9}})");
  auto p = c.problem();
  CHECK(p.group.q() == 4);
  CHECK(p.lattice.L1().exact(0, 0) == Rational(1));
  CHECK(c.run.workers == 3);
  CHECK(c.counter_options().workers == 3);
  CHECK(parse_config(serialize_config(c)) == c);

  auto f = parse_config(R"({"group":{"builtin":"free_carnot","q":3},"norm":{"alpha":1}})");
  CHECK(f.problem().group.m() == 3);
  CHECK(parse_config(serialize_config(f)) == f);

  auto e = parse_config(R"({"group":{"q":2,"m":1,"U":[[[0,1],[-1,0]]]},
    "lattice":{"L1":[[1,0],[0,1]],"L2":[["1/2"]]}})");
  CHECK(e.problem().group.name() == "explicit");
  CHECK(parse_config(serialize_config(e)) == e);
}

TEST_CASE("round trip over generated configs") {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 100; ++n) {
    Config c;
    c.group.builtin = "heisenberg";
    c.group.d = 1;
    if (rng() % 2) {
      c.alpha_exact = Rational(1 + static_cast<int>(rng() % 9), 1 + static_cast<int>(rng() % 4));
      c.alpha = to_double(*c.alpha_exact);
    } else {
      c.alpha = gen::uniform(rng, 0.3, 6);
    }
    c.M1 = rng() % 2 ? gen::near_identity(rng, 2, 5) : gen::double_matrix(rng, 2, 0.5, 1.5);
    if (c.M1->determinant() == 0) c.M1 = Matrix::identity(2);
    c.M2 = Matrix::from_rationals(1, 1, {Rational(1 + static_cast<int>(rng() % 7), 1 + static_cast<int>(rng() % 7))});
    c.run.seed = rng();
    c.run.boundary_tolerance = gen::uniform(rng, 0, 1e-6);
    const auto text = serialize_config(c);
    Config back;
    REQUIRE_NOTHROW(back = parse_config(text));
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
  }
}
