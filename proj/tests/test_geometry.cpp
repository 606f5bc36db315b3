#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "eow/geometry/wedge.hpp"

using namespace eow;
using Catch::Approx;

namespace {

// Householder reflection across the hyperplane normal to w (w orthogonal to axis keeps the axis fixed).
std::vector<double> reflect(const std::vector<double>& x, const std::vector<double>& w) {
  const double s = 2.0 * dot(x, w) / dot(w, w);
  std::vector<double> r = x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= s * w[i];
  return r;
}

EdgeModel quartic_edge(int cap = 6) {
  Coords c(2);
  EdgeModel e = EdgeModel::flat(2, cap);
  auto x1 = TruncatedPoly::variable(c.edge(), cap, "x1");
  auto x2 = TruncatedPoly::variable(c.edge(), cap, "x2");
  auto u = TruncatedPoly::variable(c.edge(), cap, "u");
  e.f[0] = x1 * x1 * x1 * x1 + x2 * x2 * u * u * Scalar(1, 2);
  e.f[1] = u * u * u * u * Scalar(-1, 3);
  e.g = x1 * x1 * x2 * x2 * Scalar(1, 4);
  return e;
}

WedgeSpec split_quadric_wedge(double aperture) {
  Coords c(2);
  WedgeSpec w;
  w.edge = EdgeModel::flat(2, 6);
  w.axis = {TruncatedPoly::constant(c.edge(), 6, 1), TruncatedPoly(c.edge(), 6)};
  w.aperture = aperture;
  w.extent = 1.0;
  w.sides = Sides::two;
  return w;
}

CompiledPoly split_quadric_graph() {
  Coords c(2);
  auto y1 = TruncatedPoly::variable(c.graph(), 6, "y1"), y2 = TruncatedPoly::variable(c.graph(), 6, "y2");
  return CompiledPoly(y1 * y1 - y2 * y2);
}

std::vector<double> on_split_quadric(double x1, double x2, double y1, double y2, double u) {
  return {x1, x2, y1, y2, u, y1 * y1 - y2 * y2};
}

}  // namespace

TEST_CASE("cone_contains examples") {
  RoundConeSpec c({1, 0, 0}, 1.0, 1.0);
  CHECK(cone_contains(c, {0.5, 0, 0}).inside);
  auto out = cone_contains(c, {0.5, 0.6, 0});
  CHECK_FALSE(out.inside);
  CHECK(out.margin == Approx(-0.1));
  CHECK_FALSE(cone_contains(c, {0, 0, 0}).inside);
  CHECK(cone_contains(c, {0, 0, 0}).margin == 0.0);
  CHECK_THROWS_AS(RoundConeSpec({1, 1, 0}, 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(RoundConeSpec({1, 0, 0}, 0.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(cone_contains(c, {1, 0}), PreconditionError);
}

TEST_CASE("cone membership is invariant under rotations fixing the axis") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> axis = normalized({g(rng), g(rng), g(rng), g(rng)});
    RoundConeSpec c(axis, 0.7, 2.0);
    std::vector<double> x{g(rng), g(rng), g(rng), g(rng)};
    auto base = cone_contains(c, x);
    std::vector<double> y = x;
    for (int k = 0; k < 3; ++k) {
      std::vector<double> w{g(rng), g(rng), g(rng), g(rng)};
      double s = dot(w, axis);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= s * axis[i];
      y = reflect(y, w);
    }
    auto moved = cone_contains(c, y);
    CHECK(moved.inside == base.inside);
    CHECK(std::fabs(moved.margin - base.margin) <= 1e-10);
  }
}

TEST_CASE("spike_contains examples and spine") {
  SpikeSpec s{1, 1, 0, 0, 0};
  CHECK(spike_contains(s, 0.1, 0.005).inside);
  CHECK_FALSE(spike_contains(s, 0.1, 0.02).inside);
  CHECK_FALSE(spike_contains(s, 0.0, 0.0).inside);
  for (double m : {-3.0, -0.5, 0.0, 0.25, 2.0})
    for (double beta : {0.1, 1.0, 5.0}) {
      SpikeSpec sp{beta, 0.8, 0, 0, m};
      const double top = sp.length / (2.0 * std::sqrt(1 + m * m));
      for (int k = 1; k < 100; ++k) {
        double e1 = top * k / 100.0;
        auto out = spike_contains(sp, e1, m * e1);
        REQUIRE(out.inside);
        const double spine = beta * e1 * e1;
        const double expected = std::min({e1, sp.length - e1 * std::sqrt(1 + m * m), spine});
        CHECK(out.margin == Approx(expected).margin(1e-15));
        if (beta * e1 <= 1.0 && spine <= sp.length / 2) CHECK(out.margin == Approx(spine).margin(1e-15));
      }
    }
}

TEST_CASE("screen_contains examples") {
  using C = std::complex<double>;
  CHECK(screen_contains(ScreenSet::preliminary(), {C(0, 0.5), C(0, 0.3)}).inside);
  auto s11 = screen_contains(ScreenSet::scaled(1, 1), {C(0.5, 0.5), C(0, 0)});
  CHECK(s11.inside);
  CHECK(s11.margin == Approx(0.125));
  CHECK(screen_contains(ScreenSet::target_delta(0.1), {C(0, 0.05), C(0, 0.004)}).inside);
  CHECK_FALSE(screen_contains(ScreenSet::target_delta(0.1), {C(0.01, 0.05), C(0, 0.004)}).inside);
  CHECK(screen_contains(ScreenSet::target(), {C(0, 0.2), C(0, 0.05)}).inside);
  CHECK_FALSE(screen_contains(ScreenSet::target(), {C(0, 0.2), C(0, 0.15)}).inside);
}

TEST_CASE("members of S_{eps,K} satisfy |xi| < eps / sqrt(K)") {
  std::mt19937_64 rng(17);
  for (auto [eps, K] : {std::pair{1.0, 1.0}, {0.25, 4.0}, {0.5, 50.0}}) {
    std::uniform_real_distribution<double> xi(-eps, eps), e1(0, eps), e2(-eps * eps, eps * eps);
    ScreenSet S = ScreenSet::scaled(eps, K);
    int members = 0;
    for (int i = 0; i < 100000; ++i) {
      C2 z{std::complex<double>(xi(rng) / std::sqrt(K), e1(rng)),
           std::complex<double>(xi(rng) / std::sqrt(K), e2(rng) * 0.1)};
      if (!screen_contains(S, z).inside) continue;
      ++members;
      REQUIRE(std::hypot(z[0].real(), z[1].real()) < eps / std::sqrt(K));
    }
    CHECK(members > 100);
  }
}

TEST_CASE("edge_distance on the flat edge") {
  EdgeModel flat = EdgeModel::flat(2, 6);
  auto d = edge_distance({0.1, -0.2, 0.0, 0.0, 0.3, 0.2}, flat);
  CHECK(d.distance == Approx(0.2).epsilon(1e-12));
  CHECK(edge_distance({0.1, -0.2, 0, 0, 0.3, 0}, flat).distance == 0.0);
  CHECK_THROWS_AS(edge_distance({3.0, 0, 0, 0, 0, 0}, flat), PreconditionError);
}

TEST_CASE("edge_distance on a quartic edge matches a normal offset and a brute-force oracle") {
  EdgeModel e = quartic_edge();
  CompiledEdge ce(e);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> box(-0.3, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a{box(rng), box(rng), box(rng)};
    auto q = ce.point(a);
    Eigen::MatrixXd jac = ce.jacobian(a);
    // A unit normal: project a random vector off the tangent space.
    Eigen::VectorXd r(6);
    for (int i = 0; i < 6; ++i) r(i) = box(rng);
    Eigen::VectorXd t = jac * (jac.transpose() * jac).ldlt().solve(jac.transpose() * r);
    Eigen::VectorXd nu = (r - t).normalized();
    std::vector<double> p(6);
    for (int i = 0; i < 6; ++i) p[static_cast<std::size_t>(i)] = q[static_cast<std::size_t>(i)] + 1e-3 * nu(i);
    auto d = edge_distance(p, ce);
    CHECK(std::fabs(d.distance - 1e-3) <= 1e-8);

    // Brute force: coordinate grid refinement around the x,u-part of p.
    std::vector<double> best{p[0], p[1], p[4]};
    auto cost = [&](const std::vector<double>& b) {
      auto y = ce.point(b);
      double s = 0;
      for (int i = 0; i < 6; ++i) s += (y[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i)]) *
                                       (y[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i)]);
      return s;
    };
    double h = 4e-3;
    for (int level = 0; level < 30; ++level, h *= 0.5) {
      std::vector<double> centre = best;
      double bc = cost(best);
      for (int i = -4; i <= 4; ++i)
        for (int j = -4; j <= 4; ++j)
          for (int k = -4; k <= 4; ++k) {
            std::vector<double> b{centre[0] + i * h / 4, centre[1] + j * h / 4, centre[2] + k * h / 4};
            double c = cost(b);
            if (c < bc) {
              bc = c;
              best = b;
            }
          }
    }
    CHECK(std::fabs(std::sqrt(cost(best)) - d.distance) <= 1e-9);
  }
}

TEST_CASE("wedge_side on the split quadric v = y1^2 - y2^2") {
  CompiledWedge w(split_quadric_wedge(1.0));
  CompiledPoly h = split_quadric_graph();
  CHECK(wedge_side(w, h, on_split_quadric(0.01, -0.02, 0.1, 0.03, 0.02)).side == Side::plus);
  CHECK(wedge_side(w, h, on_split_quadric(0.01, -0.02, -0.1, 0.03, 0.02)).side == Side::minus);
  CHECK(wedge_side(w, h, on_split_quadric(0.01, -0.02, 0.03, 0.1, 0.02)).side == Side::none);
  CHECK_THROWS_AS(wedge_side(w, h, {0, 0, 0.1, 0, 0, 0.5}), PreconditionError);
}

TEST_CASE("wedge_side reflection through a flat edge swaps sides") {
  CompiledWedge w(split_quadric_wedge(1.0));
  CompiledPoly h = split_quadric_graph();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> box(-0.2, 0.2);
  int plus = 0;
  for (int i = 0; i < 500; ++i) {
    double x1 = box(rng), x2 = box(rng), y1 = box(rng), y2 = box(rng), u = box(rng);
    auto p = on_split_quadric(x1, x2, y1, y2, u);
    auto s = wedge_side(w, h, p).side;
    if (s != Side::plus) continue;
    ++plus;
    CHECK(wedge_side(w, h, on_split_quadric(x1, x2, -y1, -y2, u)).side == Side::minus);
  }
  CHECK(plus > 20);
}
