#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "eow/series/poly_map.hpp"

using namespace eow;

namespace {

const Vars kXY = {"x1", "x2", "y1", "y2", "u", "v"};

TruncatedPoly var(const Vars& vs, const char* name, int cap = 6) { return TruncatedPoly::variable(vs, cap, name); }

// Random polynomial with small integer-ratio coefficients and degrees in [lo, hi].
TruncatedPoly random_poly(const Vars& vs, int cap, int lo, int hi, std::mt19937_64& rng, int terms = 4) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4), idx(0, static_cast<int>(vs.size()) - 1),
      deg(lo, hi);
  TruncatedPoly p(vs, cap);
  for (int k = 0; k < terms; ++k) {
    Exponent e(vs.size(), 0);
    int d = deg(rng);
    for (int j = 0; j < d; ++j) ++e[static_cast<std::size_t>(idx(rng))];
    p.add_term(e, Scalar(num(rng), den(rng)));
  }
  return p;
}

// Identity plus random higher-order terms.
PolyMap random_near_identity(const Vars& vs, int cap, std::mt19937_64& rng) {
  PolyMap m = PolyMap::identity(vs, cap);
  for (auto& c : m.components) c += random_poly(vs, cap, 2, cap, rng);
  return m;
}

}  // namespace

TEST_CASE("scalar parsing is exact") {
  CHECK(parse_scalar("0.5") == Scalar(1, 2));
  CHECK(parse_scalar("-3/6") == Scalar(-1, 2));
  CHECK(parse_scalar("1.25e-1") == Scalar(1, 8));
  CHECK(parse_scalar("0.25") == Scalar(1, 4));
  CHECK(parse_scalar("010/03") == Scalar(10, 3));
  CHECK(parse_scalar("12") == Scalar(12));
  CHECK(parse_scalar("2E3") == Scalar(2000));
  CHECK_THROWS_AS(parse_scalar("1/0"), ParseError);
  CHECK_THROWS_AS(parse_scalar("abc"), ParseError);
  CHECK_THROWS_AS(parse_scalar(""), ParseError);
  Scalar q = parse_scalar("6/4");
  CHECK(q.get_den() == 2);
  CHECK(q.get_num() == 3);
}

TEST_CASE("rationalize recovers simple fractions") {
  CHECK(rationalize(0.1) == Scalar(1, 10));
  CHECK(rationalize(-2.0 / 3.0) == Scalar(-2, 3));
  CHECK(rationalize(1.0 / std::sqrt(2.0)) != Scalar(0));
}

TEST_CASE("float view within one ulp") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> d(-1000000, 1000000), e(1, 1000000);
  for (int i = 0; i < 200; ++i) {
    Scalar q(d(rng), e(rng));
    q.canonicalize();
    double f = to_double(q);
    Scalar back(f);
    Scalar ulp(std::nextafter(std::fabs(f), INFINITY) - std::fabs(f));
    CHECK(abs(back - q) <= ulp);
  }
}

TEST_CASE("truncated poly invariants") {
  Vars vs = {"y1"};
  TruncatedPoly y = var(vs, "y1", 4);
  TruncatedPoly p = y * y * y * y * y;
  CHECK(p.is_zero());
  TruncatedPoly q = y - y;
  CHECK(q.is_zero());
  CHECK(q.terms().empty());
  CHECK(y.degree() == 1);
  CHECK((y * y).str() == "y1^2");
  CHECK_THROWS_AS(TruncatedPoly(vs, -1), PreconditionError);
}

TEST_CASE("compose: linear substitution") {
  Vars vs = {"x", "v"};
  TruncatedPoly v = var(vs, "v", 4), x = var(vs, "x", 4);
  PolyMap m = PolyMap::identity(vs, 4);
  m.components[1] = v + x * x;
  CHECK(compose_truncated(v, m, 4) == v + x * x);
}

TEST_CASE("compose: (y1 + y1^3)^2 truncated at 4") {
  Vars vs = {"y1"};
  TruncatedPoly y = var(vs, "y1", 4);
  PolyMap m{vs, vs, {y + y * y * y}};
  TruncatedPoly expected = y * y + Scalar(2) * y * y * y * y;
  CHECK(compose_truncated(y * y, m, 4) == expected);
}

TEST_CASE("compose: identity keeps rational coefficients") {
  TruncatedPoly p = var(kXY, "x1") * Scalar(1, 3) + var(kXY, "y2") * var(kXY, "u");
  CHECK(compose_truncated(p, PolyMap::identity(kXY, 6), 6) == p);
}

TEST_CASE("compose: missing variable is named") {
  Vars a = {"x", "w"};
  TruncatedPoly p = TruncatedPoly::variable(a, 4, "w");
  PolyMap m = PolyMap::identity({"x", "v"}, 4);
  try {
    compose_truncated(p, m, 4);
    FAIL("expected VariableMismatch");
  } catch (const VariableMismatch& e) {
    CHECK(e.variable() == "w");
  }
}

TEST_CASE("invert: linear and identity") {
  Vars vs = {"a", "b"};
  QMatrix d(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 1;
  PolyMap inv = invert_map_truncated(PolyMap::linear(vs, vs, d, 4), 4);
  QMatrix e(2, 2);
  e(0, 0) = Scalar(1, 2);
  e(1, 1) = 1;
  CHECK(inv.linear_part() == e);
  CHECK(inv.components[0].size() == 1);
  CHECK(invert_map_truncated(PolyMap::identity(vs, 4), 4) == PolyMap::identity(vs, 4));
}

TEST_CASE("invert: singular linear part carries determinant") {
  Vars vs = {"a", "b"};
  QMatrix s(2, 2);
  s(0, 0) = 1;
  s(0, 1) = 2;
  s(1, 0) = 2;
  s(1, 1) = 4;
  try {
    invert_map_truncated(PolyMap::linear(vs, vs, s, 4), 4);
    FAIL("expected SingularLinearPart");
  } catch (const SingularLinearPart& e) {
    CHECK(e.determinant() == "0");
  }
}

TEST_CASE("invert: z -> z + iF(z,w) in real form") {
  // z = x + iy, w = u + iv; F = z^2 + zw.  iF = i(x^2 - y^2 + xu - yv) - (2xy + xv + yu).
  Vars vs = {"x", "y", "u", "v"};
  auto x = var(vs, "x", 4), y = var(vs, "y", 4), u = var(vs, "u", 4), v = var(vs, "v", 4);
  PolyMap m = PolyMap::identity(vs, 4);
  m.components[0] = x - (Scalar(2) * x * y + x * v + y * u);
  m.components[1] = y + (x * x - y * y + x * u - y * v);
  PolyMap inv = invert_map_truncated(m, 4);
  CHECK(compose_maps(inv, m, 4) == PolyMap::identity(vs, 4));
  CHECK(compose_maps(m, inv, 4) == PolyMap::identity(vs, 4));
}

TEST_CASE("graph_solve examples") {
  Vars vs = {"y1", "y2", "v"};
  auto y1 = var(vs, "y1", 4), y2 = var(vs, "y2", 4), v = var(vs, "v", 4);
  Vars rest = {"y1", "y2"};
  auto r1 = var(rest, "y1", 4), r2 = var(rest, "y2", 4);

  CHECK(graph_solve(-v + y1 * y1 - y2 * y2, "v", 4) == r1 * r1 - r2 * r2);
  CHECK(graph_solve(-v, "v", 4).is_zero());
  CHECK(graph_solve(-v + v * y1 + y1 * y1, "v", 4) == r1 * r1 + r1 * r1 * r1 + r1 * r1 * r1 * r1);
  CHECK_THROWS_AS(graph_solve(y1 * y1 + v * v, "v", 4), PreconditionError);
}

TEST_CASE("eval_poly examples") {
  Vars vs = {"y1", "y2"};
  auto y1 = var(vs, "y1"), y2 = var(vs, "y2");
  TruncatedPoly p = y1 * y1 - y2 * y2;
  std::vector<Scalar> a{1, 1}, b{3, 2};
  CHECK(eval_poly(p, a) == 0);
  CHECK(eval_poly(p, b) == 5);
  std::vector<Scalar> c{Scalar(1, 7), Scalar(-2, 9)};
  CHECK(eval_poly(TruncatedPoly(vs, 6), c) == 0);
  std::vector<Scalar> bad{1};
  CHECK_THROWS_AS(eval_poly(p, bad), PreconditionError);
}

TEST_CASE("property: invert/compose round trips") {
  std::mt19937_64 rng(20240611);
  const int cap = 6;
  Vars vs = {"x1", "x2", "y1", "y2"};
  for (int trial = 0; trial < 30; ++trial) {
    PolyMap m = random_near_identity(vs, cap, rng);
    PolyMap inv = invert_map_truncated(m, cap);
    REQUIRE(compose_maps(inv, m, cap) == PolyMap::identity(vs, cap));
  }
}

TEST_CASE("property: graph_solve residual vanishes") {
  std::mt19937_64 rng(99);
  const int cap = 6;
  Vars vs = {"x1", "y1", "u", "v"};
  for (int trial = 0; trial < 30; ++trial) {
    TruncatedPoly r = -TruncatedPoly::variable(vs, cap, "v") + random_poly(vs, cap, 2, cap, rng, 6);
    TruncatedPoly h = graph_solve(r, "v", cap);
    CHECK(h.constant_term() == 0);
    REQUIRE(compose_truncated(r, substitution_map(vs, "v", h), cap).is_zero());
  }
}

TEST_CASE("property: composition is a ring homomorphism") {
  std::mt19937_64 rng(5);
  const int cap = 5;
  Vars vs = {"a", "b", "c"};
  for (int trial = 0; trial < 20; ++trial) {
    TruncatedPoly p = random_poly(vs, cap, 0, cap, rng), q = random_poly(vs, cap, 0, cap, rng);
    PolyMap m = random_near_identity(vs, cap, rng);
    CHECK(compose_truncated(p + q, m, cap) == compose_truncated(p, m, cap) + compose_truncated(q, m, cap));
    CHECK(compose_truncated(p * q, m, cap) == compose_truncated(p, m, cap) * compose_truncated(q, m, cap));
  }
}

TEST_CASE("property: exact and float evaluation agree") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pt(-1.0, 1.0);
  std::uniform_int_distribution<int> num(-1000, 1000), den(1, 97);
  Vars vs = {"a", "b", "c"};
  for (int trial = 0; trial < 50; ++trial) {
    TruncatedPoly p(vs, 6);
    for (int k = 0; k < 8; ++k) {
      Exponent e{static_cast<uint8_t>(trial % 3), static_cast<uint8_t>(k % 3), static_cast<uint8_t>(k / 3)};
      p.add_term(e, Scalar(num(rng), den(rng)));
    }
    std::vector<double> xf{pt(rng), pt(rng), pt(rng)};
    std::vector<Scalar> xq{Scalar(xf[0]), Scalar(xf[1]), Scalar(xf[2])};
    double exact = to_double(eval_poly(p, xq));
    double flt = eval_poly(p, std::span<const double>(xf));
    double scale = 0;
    for (const auto& [e, c] : p.terms()) scale += std::fabs(to_double(c));
    CHECK(std::fabs(exact - flt) <= 1e-12 * std::max(scale, 1.0));
  }
}
