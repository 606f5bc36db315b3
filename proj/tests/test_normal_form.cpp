#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "models.hpp"

using namespace eow;
using namespace testmodels;
using Catch::Approx;
using cd = std::complex<double>;

namespace {

QMatrix qmat(std::initializer_list<std::initializer_list<long>> rows) {
  QMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (long v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

DMatrix dmat(const QMatrix& q) { return to_double(q); }

double max_abs(const DMatrix& m) {
  double s = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s = std::max(s, std::fabs(m(i, j)));
  return s * static_cast<double>(m.rows());
}

bool is_identity(const PolyMap& m) { return m == PolyMap::identity(m.source, m.components.front().cap()); }

// Invariants every normal form must satisfy.
void check_invariants(const HypersurfaceModel& M, const NormalFormData& nf) {
  Coords c(nf.n);
  const int cap = nf.cap;
  // Chain and inverse are mutually inverse through the cap.
  CHECK(compose_maps(nf.chain, nf.chain_inverse, cap) == PolyMap::identity(c.ambient(), cap));
  CHECK(compose_maps(nf.chain_inverse, nf.chain, cap) == PolyMap::identity(c.ambient(), cap));
  // Edge inclusion, osculation, graph and quadratic shape.
  HypersurfaceModel out{nf.n, cap, nf.r, nf.edge, std::vector<Scalar>(static_cast<std::size_t>(nf.n + 1), Scalar(0))};
  CHECK(out.edge_residual().is_zero());
  for (const auto& f : nf.edge.f) CHECK(f.order() >= 4);
  CHECK(nf.edge.g.order() >= 4);
  CHECK(graph_solve(nf.r, "v", cap) == nf.h);
  auto q = extract_quadratic_data(nf.h);
  CHECK(q.Lambda == nf.Lambda);
  CHECK(q.Omega == nf.Omega);
  CHECK(q.Gamma == QMatrix(static_cast<std::size_t>(nf.n), static_cast<std::size_t>(nf.n)));
  for (const auto& m : q.mu) CHECK(m == 0);
  // The normal defining function is the scaled input pulled back by the chain.
  TruncatedPoly back = compose_truncated(detail::translated(M).r, nf.chain, cap) * nf.frame.r_scale;
  CHECK(back == nf.r);
}

// Levi matrix 2 r_scale E^t [r_{a bbar}] conj(E) from second derivatives of the input.
Eigen::MatrixXcd levi_oracle(const HypersurfaceModel& M, const NormalFormData& nf) {
  Coords c(M.n);
  const auto p = M.base_point();
  const auto m = static_cast<std::size_t>(M.n + 1);
  auto d2 = [&](std::size_t a, std::size_t b) { return to_double(eval_poly(M.r.derivative(a).derivative(b), p)); };
  Eigen::MatrixXcd H(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const int ia = static_cast<int>(a), ib = static_cast<int>(b);
      H(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          0.25 * cd(d2(c.re(ia), c.re(ib)) + d2(c.im(ia), c.im(ib)), d2(c.re(ia), c.im(ib)) - d2(c.im(ia), c.re(ib)));
    }
  Eigen::MatrixXcd E(static_cast<Eigen::Index>(m), M.n);
  for (int k = 0; k < M.n; ++k)
    for (std::size_t a = 0; a < m; ++a) {
      const auto& e = nf.frame.basis[static_cast<std::size_t>(k)];
      E(static_cast<Eigen::Index>(a), k) = cd(to_double(e[c.re(static_cast<int>(a))]), to_double(e[c.im(static_cast<int>(a))]));
    }
  return 2.0 * to_double(nf.frame.r_scale) * E.transpose() * H * E.conjugate();
}

void check_levi_oracle(const HypersurfaceModel& M, const NormalFormData& nf) {
  auto L = levi_oracle(M, nf);
  for (int i = 0; i < nf.n; ++i)
    for (int j = 0; j < nf.n; ++j) {
      const auto ii = static_cast<std::size_t>(i), jj = static_cast<std::size_t>(j);
      CHECK(std::abs(L(i, j) - cd(to_double(nf.Lambda(ii, jj)), to_double(nf.Omega(ii, jj)))) <= 1e-10);
    }
}

// v = y1^2 + y2^2 - y3^2 + x1 y2 - x2 y1 over the flat edge in C^4.
HypersurfaceModel three_dim_quadric(int cap = 4) {
  auto x1 = gvar(3, cap, "x1"), x2 = gvar(3, cap, "x2"), y1 = gvar(3, cap, "y1"), y2 = gvar(3, cap, "y2"),
       y3 = gvar(3, cap, "y3");
  return HypersurfaceModel::from_graph(y1 * y1 + y2 * y2 - y3 * y3 + x1 * y2 - x2 * y1, EdgeModel::flat(3, cap));
}

WedgeSpec ambient_wedge(const EdgeModel& e, const std::vector<Scalar>& sigma, double aperture) {
  Coords c(e.n);
  WedgeSpec w;
  w.edge = e;
  for (const auto& s : sigma) w.axis.push_back(TruncatedPoly::constant(c.edge(), e.g.cap(), s));
  w.aperture = aperture;
  return w;
}

}  // namespace

TEST_CASE("normal form of the split quadric with a flat edge") {
  auto M = split_quadric();
  auto nf = normal_form(M);
  CHECK(nf.Lambda == qmat({{1, 0}, {0, -1}}));
  CHECK(nf.Omega == qmat({{0, 0}, {0, 0}}));
  CHECK(is_identity(nf.osculating));
  CHECK(is_identity(nf.final_change));
  CHECK(nf.frame.R == QMatrix::identity(6));
  CHECK(nf.h == graph_solve(M.r, "v", M.cap));
  check_invariants(M, nf);
  check_levi_oracle(M, nf);
}

TEST_CASE("normal form of the hyperquadric") {
  auto M = hyperquadric();
  auto nf = normal_form(M);
  CHECK(nf.Lambda == qmat({{0, 0}, {0, 0}}));
  CHECK(nf.Omega == qmat({{0, -1}, {1, 0}}));
  auto levi = levi_data(nf.Lambda, nf.Omega);
  CHECK(levi.n_plus == 1);
  CHECK(levi.n_minus == 1);
  REQUIRE(levi.eigenvalues.size() == 2);
  CHECK(levi.eigenvalues[0] == Approx(-1));
  CHECK(levi.eigenvalues[1] == Approx(1));
  check_invariants(M, nf);
  check_levi_oracle(M, nf);
}

TEST_CASE("frame aligned with a wedge axis sends it to d/dy1") {
  auto M = split_quadric();
  Coords c(2);
  std::vector<Scalar> sigma(6, Scalar(0));
  sigma[c.y(0)] = 1;
  sigma[c.y(1)] = 1;
  auto nf = normal_form(M, {std::nullopt, sigma});
  // y-parts of the frame vectors; for a flat edge Lambda transforms as E^t Lambda E.
  QMatrix E(2, 2);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < 2; ++j) E(j, k) = nf.frame.basis[k][c.x(static_cast<int>(j))];
  CHECK(nf.Lambda == E.transpose() * qmat({{1, 0}, {0, -1}}) * E);
  CHECK(nf.Lambda(0, 0) == 0);
  auto s = *inverse(nf.frame.R) * sigma;
  CHECK(s[c.y(0)] > 0);
  for (std::size_t k = 0; k < 6; ++k)
    if (k != c.y(0)) CHECK(s[k] == 0);
  check_invariants(M, nf);
}

TEST_CASE("final change removes the symmetric x-y coupling") {
  auto x1 = gvar(2, 6, "x1"), y1 = gvar(2, 6, "y1"), y2 = gvar(2, 6, "y2");
  auto M = HypersurfaceModel::from_graph(y1 * y1 - y2 * y2 + x1 * y1, EdgeModel::flat(2, 6));
  auto nf = normal_form(M);
  CHECK(nf.h.homogeneous_part(2) == y1 * y1 - y2 * y2);
  CHECK(nf.Gamma == qmat({{1, 0}, {0, 0}}));
  CHECK(nf.Omega == qmat({{0, 0}, {0, 0}}));
  CHECK_FALSE(is_identity(nf.final_change));
  check_invariants(M, nf);
  check_levi_oracle(M, nf);
}

TEST_CASE("u-y coupling is removed and recorded as mu") {
  auto u = gvar(2, 6, "u"), y1 = gvar(2, 6, "y1"), y2 = gvar(2, 6, "y2");
  auto M = HypersurfaceModel::from_graph(y1 * y1 - y2 * y2 + u * y2 * Scalar(3), EdgeModel::flat(2, 6));
  auto nf = normal_form(M);
  CHECK(nf.mu == std::vector<Scalar>{0, 6});
  CHECK(nf.h.homogeneous_part(2) == y1 * y1 - y2 * y2);
  check_invariants(M, nf);
}

TEST_CASE("an edge already osculating to order three passes through unchanged") {
  Coords c(2);
  const int cap = 6;
  EdgeModel e = EdgeModel::flat(2, cap);
  auto ex1 = TruncatedPoly::variable(c.edge(), cap, "x1");
  e.f[0] = ex1 * ex1 * ex1 * ex1;
  auto x1 = gvar(2, cap, "x1"), y1 = gvar(2, cap, "y1"), y2 = gvar(2, cap, "y2");
  auto M = HypersurfaceModel::from_graph(y1 * y1 - y2 * y2 - x1 * x1 * x1 * x1 * y1, e);
  M.validate();
  auto nf = normal_form(M);
  CHECK(nf.edge.f[0] == e.f[0]);
  CHECK(nf.edge.f[1] == e.f[1]);
  CHECK(nf.edge.g == e.g);
  CHECK(is_identity(nf.osculating));
  CHECK(nf.Lambda == qmat({{1, 0}, {0, -1}}));
  check_invariants(M, nf);
}

TEST_CASE("curved edges with moved base points and general linear frames satisfy the invariants") {
  std::mt19937_64 rng(101);
  int done = 0;
  for (int trial = 0; trial < 30 && done < 8; ++trial) {
    const int n = trial % 5 == 4 ? 3 : 2;
    HypersurfaceModel M = exact_random_model(rng, n, 4);
    Coords c(n);
    if (trial % 3 == 1) {
      // Move the base point away from the origin.
      std::vector<Scalar> P(c.dim());
      for (auto& x : P) x = small_rational(rng, 2, 7);
      M.r = compose_truncated(M.r, detail::shift_map(c.ambient(), [&] {
                                auto m = P;
                                for (auto& x : m) x = -x;
                                return m;
                              }(), M.cap), M.cap);
      std::vector<Scalar> Pxu;
      for (int k = 0; k < n; ++k) Pxu.push_back(-P[c.x(k)]);
      Pxu.push_back(-P[c.u()]);
      PolyMap shift = detail::shift_map(c.edge(), Pxu, M.cap);
      for (int k = 0; k < n; ++k) {
        auto& f = M.edge.f[static_cast<std::size_t>(k)];
        f = compose_truncated(f, shift, M.cap) + TruncatedPoly::constant(c.edge(), M.cap, P[c.y(k)]);
      }
      M.edge.g = compose_truncated(M.edge.g, shift, M.cap) + TruncatedPoly::constant(c.edge(), M.cap, P[c.v()]);
      M.base.clear();
      for (int k = 0; k < n; ++k) M.base.push_back(P[c.x(k)]);
      M.base.push_back(P[c.u()]);
    } else if (trial % 3 == 2) {
      M = reframed(M, random_complex_linear(rng, c));
    }
    NormalFormData nf;
    try {
      nf = normal_form(M);
    } catch (const PreconditionError&) {
      continue;  // non-generic random edge
    }
    ++done;
    check_invariants(M, nf);
    check_levi_oracle(M, nf);
  }
  CHECK(done >= 6);
}

TEST_CASE("normal form is idempotent") {
  std::mt19937_64 rng(7);
  std::vector<HypersurfaceModel> models{split_quadric(), hyperquadric(), three_dim_quadric()};
  for (int i = 0; i < 4; ++i) {
    HypersurfaceModel M = exact_random_model(rng, 2, 4);
    if (i % 2) M = reframed(M, random_complex_linear(rng, Coords(M.n)));
    models.push_back(M);
  }
  for (const auto& M : models) {
    NormalFormData nf;
    try {
      nf = normal_form(M);
    } catch (const PreconditionError&) {
      continue;
    }
    HypersurfaceModel again{nf.n, nf.cap, nf.r, nf.edge, std::vector<Scalar>(static_cast<std::size_t>(nf.n + 1), Scalar(0))};
    auto nf2 = normal_form(again);
    CHECK(nf2.frame.R == QMatrix::identity(Coords(nf.n).dim()));
    CHECK(nf2.frame.r_scale == 1);
    CHECK(is_identity(nf2.osculating));
    CHECK(is_identity(nf2.final_change));
    CHECK(nf2.Lambda == nf.Lambda);
    CHECK(nf2.Omega == nf.Omega);
    CHECK(nf2.h == nf.h);
  }
}

TEST_CASE("Levi spectrum and verdicts are invariant under unitary reframing") {
  std::mt19937_64 rng(55);
  std::vector<std::pair<HypersurfaceModel, double>> cases{
      {split_quadric(4), 0.1}, {hyperquadric(4), 8.0}, {three_dim_quadric(), 0.3}};
  for (int i = 0; i < 4; ++i) cases.emplace_back(exact_random_model(rng, 2, 4), 0.3);
  int checked = 0;
  for (const auto& [M, aperture] : cases) {
    NormalFormData nf;
    try {
      nf = normal_form(M);
    } catch (const PreconditionError&) {
      continue;
    }
    Coords c(M.n);
    const auto eig = metric_levi_eigenvalues(M, nf);
    auto sig = levi_data(nf.Lambda, nf.Omega);
    // A few axes in N: combinations of J e_k.
    std::vector<std::vector<Scalar>> axes;
    for (int a = 0; a < 3; ++a) {
      std::vector<Scalar> s(c.dim(), Scalar(0));
      for (int k = 0; k < M.n; ++k) {
        const Scalar coef = a == 0 ? Scalar(k == 0 ? 1 : 0) : small_rational(rng, 3, 2);
        auto je = c.J(nf.frame.basis[static_cast<std::size_t>(k)]);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += coef * je[i];
      }
      if (std::any_of(s.begin(), s.end(), [](const Scalar& x) { return x != 0; })) axes.push_back(s);
    }
    for (int rep = 0; rep < 2; ++rep) {
      QMatrix U = random_unitary(rng, c);
      auto M2 = reframed(M, U);
      auto nf2 = normal_form(M2);
      auto eig2 = metric_levi_eigenvalues(M2, nf2);
      REQUIRE(eig2.size() == eig.size());
      for (std::size_t i = 0; i < eig.size(); ++i) CHECK(std::fabs(eig[i] - eig2[i]) <= 1e-9);
      auto sig2 = levi_data(nf2.Lambda, nf2.Omega);
      CHECK(sig2.n_plus == sig.n_plus);
      CHECK(sig2.n_minus == sig.n_minus);
      const QMatrix Uinv = *inverse(U);
      for (const auto& s : axes) {
        auto v1 = classify_wedge(M, ambient_wedge(M.edge, s, aperture), nf);
        auto v2 = classify_wedge(M2, ambient_wedge(M2.edge, Uinv * s, aperture), nf2);
        CHECK(v1.verdict == v2.verdict);
        CHECK(v1.side == v2.side);
        ++checked;
      }
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("exact signature agrees with floating eigenvalues") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
    QMatrix Lam(n, n), Om(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        Lam(i, j) = Lam(j, i) = small_rational(rng, 3, 2);
        if (i != j) {
          Om(i, j) = small_rational(rng, 3, 2);
          Om(j, i) = -Om(i, j);
        }
      }
    if (trial % 5 == 0) {
      // Force a kernel: L = v v^* - w w^* style rank deficiency through a zero row/column.
      for (std::size_t i = 0; i < n; ++i) Lam(0, i) = Lam(i, 0) = Om(0, i) = Om(i, 0) = 0;
    }
    auto d = levi_data(Lam, Om);
    int pos = 0, neg = 0, zero = 0;
    for (double e : d.eigenvalues) {
      if (std::fabs(e) < 1e-9) ++zero;
      else if (e > 0) ++pos;
      else ++neg;
    }
    CHECK(d.n_plus == pos);
    CHECK(d.n_minus == neg);
    CHECK(d.n_zero == zero);
  }
}

TEST_CASE("levi_classify_direction examples and rescaling") {
  QMatrix split = qmat({{1, 0}, {0, -1}});
  CHECK(levi_classify_direction(split, {1, 1}).cls == DirectionClass::null);
  CHECK(levi_classify_direction(split, {1, 0}).cls == DirectionClass::positive);
  CHECK(levi_classify_direction(split, {0, 3}).cls == DirectionClass::negative);
  CHECK(levi_classify_direction(QMatrix(2, 2), {2, -5}).cls == DirectionClass::null);
  CHECK_THROWS_AS(levi_classify_direction(split, {0, 0}), PreconditionError);
  CHECK_THROWS_AS(levi_classify_direction(split, {1, 0, 0}), PreconditionError);
  CHECK(levi_classify_direction(dmat(split), {1.0, 1.0}) == DirectionClass::null);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    QMatrix L(3, 3);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a; b < 3; ++b) L(a, b) = L(b, a) = small_rational(rng);
    std::vector<Scalar> s{small_rational(rng), small_rational(rng), small_rational(rng)};
    if (std::all_of(s.begin(), s.end(), [](const Scalar& x) { return x == 0; })) continue;
    const Scalar k = abs(small_rational(rng, 9, 7)) + Scalar(1, 1000);
    auto scaled = s;
    for (auto& x : scaled) x *= k;
    CHECK(levi_classify_direction(L, s).cls == levi_classify_direction(L, scaled).cls);
  }
}

TEST_CASE("find_null_in_cone examples") {
  DMatrix split = dmat(qmat({{1, 0}, {0, -1}}));
  const double r = 1 / std::sqrt(2.0);
  auto a = find_null_in_cone(split, RoundConeSpec({r, r}, 0.1, 1.0));
  REQUIRE(a.witness);
  CHECK((*a.witness)[0] == Approx(r).margin(1e-15));
  CHECK((*a.witness)[1] == Approx(r).margin(1e-15));
  auto b = find_null_in_cone(split, RoundConeSpec({1, 0}, 0.1, 1.0));
  CHECK_FALSE(b.witness);
  // Exact minimum over the closed cross-section is on its boundary: 1 - d^2.
  CHECK(b.q_min == Approx(1 - 0.01).epsilon(1e-14));
  auto z = find_null_in_cone(DMatrix(3, 3), RoundConeSpec(normalized({1, 2, 2}), 0.5, 1.0));
  REQUIRE(z.witness);
  CHECK(*z.witness == normalized({1, 2, 2}));
}

TEST_CASE("find_null_in_cone agrees with a dense scan for n = 2") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> ap(0.05, 2.0);
  int present = 0, absent = 0;
  for (int trial = 0; trial < 60; ++trial) {
    DMatrix L(2, 2);
    L(0, 0) = g(rng);
    L(1, 1) = g(rng);
    L(0, 1) = L(1, 0) = g(rng);
    auto axis = normalized({g(rng), g(rng)});
    const double delta = ap(rng);
    const std::vector<double> perp{-axis[1], axis[0]};
    auto q = [&](double s) {
      std::vector<double> d{axis[0] + s * perp[0], axis[1] + s * perp[1]};
      return dot(d, L * d) / dot(d, d);
    };
    const int N = 100000;
    bool change = false;
    double prev = q(-delta + delta / N), minabs = INFINITY;
    for (int i = 1; i < N; ++i) {
      const double s = -delta + delta * (2.0 * i + 1) / N;
      const double cur = q(s);
      minabs = std::min(minabs, std::fabs(cur));
      if ((cur <= 0) != (prev <= 0) || cur == 0.0) change = true;
      prev = cur;
    }
    auto res = find_null_in_cone(L, RoundConeSpec(axis, delta, 1.0));
    if (!change && minabs < 1e-6) continue;  // tangential or boundary zero below scan resolution
    CHECK(res.witness.has_value() == change);
    if (res.witness) {
      ++present;
      CHECK(std::fabs(dot(*res.witness, L * *res.witness)) <= 1e-10);
      CHECK(cone_contains(RoundConeSpec(axis, delta, 2.0), *res.witness).inside);
    } else {
      ++absent;
    }
  }
  CHECK(present > 5);
  CHECK(absent > 5);
}

TEST_CASE("find_null_in_cone in higher dimension agrees with sampling") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> ap(0.1, 1.5);
  int present = 0, absent = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 3);
    DMatrix L(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) L(i, j) = L(j, i) = g(rng);
    std::vector<double> axis(n);
    for (auto& x : axis) x = g(rng);
    axis = normalized(axis);
    const double delta = ap(rng);
    RoundConeSpec cone(axis, delta, 1.0);
    auto res = find_null_in_cone(L, cone);
    double smin = INFINITY, smax = -INFINITY;
    for (int i = 0; i < 20000; ++i) {
      std::vector<double> w(n);
      for (auto& x : w) x = g(rng);
      const double s = dot(w, axis);
      for (std::size_t k = 0; k < n; ++k) w[k] -= s * axis[k];
      const double rad = delta * std::pow(std::uniform_real_distribution<double>(0, 1)(rng), 1.0 / double(n - 1));
      const double wn = norm2(w);
      std::vector<double> d(n);
      for (std::size_t k = 0; k < n; ++k) d[k] = axis[k] + rad * w[k] / wn;
      const double q = dot(d, L * d);
      smin = std::min(smin, q);
      smax = std::max(smax, q);
    }
    CHECK(res.q_min <= smin + 1e-12);
    CHECK(res.q_max >= smax - 1e-12);
    if (smin < 0 && smax > 0) CHECK(res.witness);
    if (res.witness) {
      ++present;
      CHECK(std::fabs(dot(*res.witness, L * *res.witness)) <= 1e-12 * std::max(1.0, max_abs(L)));
      CHECK(cone_contains(RoundConeSpec(axis, delta, 2.0), *res.witness).inside);
    } else {
      ++absent;
      CHECK((res.q_min > 0 || res.q_max < 0));
    }
  }
  CHECK(present > 5);
  CHECK(absent > 5);
}

TEST_CASE("classify_wedge on the split quadric") {
  auto M = split_quadric();
  auto two = classify_wedge(M, constant_wedge(M.edge, {1, 1}, 0.1));
  CHECK(two.verdict == Verdict::two_sided);
  REQUIRE(two.witness);
  Coords c(2);
  const double r = 1 / std::sqrt(2.0);
  CHECK((*two.witness)[c.y(0)] == Approx(r).margin(1e-12));
  CHECK((*two.witness)[c.y(1)] == Approx(r).margin(1e-12));
  CHECK(std::fabs(two.witness_q) <= 1e-12);
  CHECK(two.levi.n_plus == 1);
  CHECK(two.levi.n_minus == 1);

  auto one = classify_wedge(M, constant_wedge(M.edge, {1, 0}, 0.1));
  CHECK(one.verdict == Verdict::one_sided);
  CHECK(one.side == ExtensionSide::r_negative);
  REQUIRE(one.witness);
  CHECK((*one.witness)[c.y(0)] == Approx(1.0));
  CHECK(one.witness_q > 0);
  CHECK(one.q_axis_exact == 1);
  bool noted = false;
  for (const auto& note : one.notes)
    if (note.find("need not extend") != std::string::npos) noted = true;
  CHECK(noted);

  auto neg = classify_wedge(M, constant_wedge(M.edge, {0, 1}, 0.1));
  CHECK(neg.verdict == Verdict::one_sided);
  CHECK(neg.side == ExtensionSide::r_positive);
}

TEST_CASE("classify_wedge on the hyperquadric: every axis gives two-sided extension") {
  auto M = hyperquadric();
  for (int k = 0; k < 8; ++k) {
    const double t = 2 * M_PI * k / 8;
    auto sigma = std::vector<Scalar>{rationalize(std::cos(t)), rationalize(std::sin(t))};
    auto res = classify_wedge(M, constant_wedge(M.edge, sigma, 8.0));
    CHECK(res.verdict == Verdict::two_sided);
    REQUIRE(res.witness);
    CHECK(std::fabs(res.witness_q) <= 1e-12);
  }
}

TEST_CASE("definite Levi forms give one-sided or no guarantee") {
  auto y1 = gvar(2, 6, "y1"), y2 = gvar(2, 6, "y2"), x1 = gvar(2, 6, "x1");
  auto pos = HypersurfaceModel::from_graph(y1 * y1 + y2 * y2, EdgeModel::flat(2, 6));
  auto res = classify_wedge(pos, constant_wedge(pos.edge, {1, 2}, 0.5));
  CHECK(res.verdict == Verdict::one_sided);
  CHECK(res.side == ExtensionSide::r_negative);
  auto neg = HypersurfaceModel::from_graph(-y1 * y1, EdgeModel::flat(2, 6));
  CHECK(classify_wedge(neg, constant_wedge(neg.edge, {1, 0}, 0.5)).side == ExtensionSide::r_positive);
  // Lambda = 0 with a definite Omega-free form: L = 0 entirely.
  auto flat = HypersurfaceModel::from_graph(x1 * x1 * x1 * y1, EdgeModel::flat(2, 6));
  auto none = classify_wedge(flat, constant_wedge(flat.edge, {1, 0}, 0.5));
  CHECK(none.verdict == Verdict::no_guarantee);
}

TEST_CASE("normal form preconditions") {
  auto y1 = gvar(1, 6, "y1");
  CHECK_THROWS_AS(HypersurfaceModel::from_graph(y1 * y1, EdgeModel::flat(1, 6)).validate(), PreconditionError);

  Coords c(2);
  auto M = split_quadric();
  M.edge.g = TruncatedPoly::variable(c.edge(), 6, "x1") * TruncatedPoly::variable(c.edge(), 6, "x1");
  CHECK_THROWS_AS(normal_form(M), PreconditionError);  // edge not in M

  auto S = split_quadric();
  S.r = S.r * S.r;  // gradient vanishes
  CHECK_THROWS_AS(normal_form(S), PreconditionError);

  auto Q = split_quadric();
  std::vector<Scalar> bad(6, Scalar(0));
  bad[c.x(0)] = 1;
  CHECK_THROWS_AS(normal_form(Q, {std::nullopt, bad}), PreconditionError);
  CHECK_THROWS_AS(classify_wedge(Q, ambient_wedge(Q.edge, bad, 0.5)), PreconditionError);
  std::vector<Scalar> tau(6, Scalar(0));
  tau[c.y(0)] = 1;
  CHECK_THROWS_AS(normal_form(Q, {tau, std::nullopt}), PreconditionError);  // tangent to M
}

TEST_CASE("transverse tau rescales the defining function") {
  auto M = split_quadric();
  Coords c(2);
  std::vector<Scalar> tau(6, Scalar(0));
  tau[c.v()] = Scalar(2);
  auto nf = normal_form(M, {tau, std::nullopt});
  CHECK(nf.frame.r_scale == Scalar(1, 2));
  CHECK_FALSE(nf.frame.orientation_flipped);
  check_invariants(M, nf);
  tau[c.v()] = Scalar(-3);
  auto flipped = normal_form(M, {tau, std::nullopt});
  CHECK(flipped.frame.orientation_flipped);
  check_invariants(M, flipped);
}
