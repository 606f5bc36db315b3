#ifndef EOW_GEOMETRY_EDGE_HPP
#define EOW_GEOMETRY_EDGE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <vector>

#include "eow/error.hpp"
#include "eow/geometry/coords.hpp"
#include "eow/series/poly_map.hpp"

namespace eow {

/// Edge E = {y = f(x,u), v = g(x,u)} with f, g polynomials in x_1..x_n, u.
struct EdgeModel {
  int n = 2;
  std::vector<TruncatedPoly> f;
  TruncatedPoly g;

  static EdgeModel flat(int n, int cap) {
    Coords c(n);
    EdgeModel e{n, {}, TruncatedPoly(c.edge(), cap)};
    for (int k = 0; k < n; ++k) e.f.emplace_back(c.edge(), cap);
    return e;
  }

  void validate() const {
    Coords c(n);
    if (f.size() != static_cast<std::size_t>(n)) throw PreconditionError("edge needs one y-graph per x variable");
    for (const auto& p : f)
      if (p.vars() != c.edge()) throw VariableMismatch("edge graph must be a polynomial in x1..xn, u", "");
    if (g.vars() != c.edge()) throw VariableMismatch("edge v-graph must be a polynomial in x1..xn, u", "");
  }

  /// Parametrization a -> (x, f(a), u, g(a)) as a map into ambient coordinates.
  PolyMap embedding() const {
    Coords c(n);
    const int cap = g.cap();
    PolyMap m{c.edge(), c.ambient(), {}};
    for (int k = 0; k < n; ++k) m.components.push_back(TruncatedPoly::variable(c.edge(), cap, c.edge()[k]));
    for (int k = 0; k < n; ++k) m.components.push_back(f[static_cast<std::size_t>(k)]);
    m.components.push_back(TruncatedPoly::variable(c.edge(), cap, "u"));
    m.components.push_back(g);
    return m;
  }

  bool is_flat() const {
    for (const auto& p : f)
      if (!p.is_zero()) return false;
    return g.is_zero();
  }
};

/// Float evaluator of an edge and its first derivatives.
class CompiledEdge {
 public:
  explicit CompiledEdge(const EdgeModel& e) : n_(e.n) {
    e.validate();
    for (const auto& p : e.f) comps_.emplace_back(p);
    comps_.emplace_back(e.g);
    for (const auto& p : e.f) push_derivs(p);
    push_derivs(e.g);
  }

  int n() const { return n_; }

  std::vector<double> point(const std::vector<double>& a) const {
    Coords c(n_);
    std::vector<double> p(c.dim());
    for (int k = 0; k < n_; ++k) {
      p[c.x(k)] = a[static_cast<std::size_t>(k)];
      p[c.y(k)] = comps_[static_cast<std::size_t>(k)](a);
    }
    p[c.u()] = a[static_cast<std::size_t>(n_)];
    p[c.v()] = comps_.back()(a);
    return p;
  }

  /// d point / d a as a (2n+2) x (n+1) matrix.
  Eigen::MatrixXd jacobian(const std::vector<double>& a) const {
    Coords c(n_);
    const int m = n_ + 1;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(c.dim()), m);
    for (int k = 0; k < n_; ++k) jac(static_cast<Eigen::Index>(c.x(k)), k) = 1.0;
    jac(static_cast<Eigen::Index>(c.u()), n_) = 1.0;
    for (int j = 0; j <= n_; ++j) {
      const auto row = static_cast<Eigen::Index>(j < n_ ? c.y(j) : c.v());
      for (int k = 0; k < m; ++k) jac(row, k) = derivs_[static_cast<std::size_t>(j * m + k)](a);
    }
    return jac;
  }

 private:
  void push_derivs(const TruncatedPoly& p) {
    for (std::size_t k = 0; k < p.nvars(); ++k) derivs_.emplace_back(p.derivative(k));
  }

  int n_;
  std::vector<CompiledPoly> comps_;
  std::vector<CompiledPoly> derivs_;
};

struct EdgeProjectionOptions {
  double chart_radius = 1.0;  // half-width of the coordinate box around the origin
  int max_iterations = 100;
  int grid_points = 21;       // per parameter in the fallback search
};

struct EdgeProjection {
  double distance = 0.0;
  std::vector<double> params;  // (x, u) of the nearest edge point
  std::vector<double> foot;    // ambient coordinates of the nearest edge point
  int iterations = 0;
  bool used_fallback = false;
};

namespace detail {

struct GaussNewtonResult {
  std::vector<double> a;
  double cost = 0;
  int iterations = 0;
  bool converged = false;
};

inline GaussNewtonResult gauss_newton(const CompiledEdge& e, const std::vector<double>& p, std::vector<double> a,
                                      int max_iter, std::ostringstream* trace) {
  auto cost_at = [&](const std::vector<double>& b) {
    auto q = e.point(b);
    double s = 0;
    for (std::size_t i = 0; i < q.size(); ++i) s += (q[i] - p[i]) * (q[i] - p[i]);
    return s;
  };
  GaussNewtonResult res{a, cost_at(a), 0, false};
  const auto m = static_cast<Eigen::Index>(a.size());
  for (int it = 0; it < max_iter; ++it) {
    res.iterations = it + 1;
    auto q = e.point(res.a);
    Eigen::VectorXd r(static_cast<Eigen::Index>(q.size()));
    for (std::size_t i = 0; i < q.size(); ++i) r(static_cast<Eigen::Index>(i)) = q[i] - p[i];
    Eigen::MatrixXd jac = e.jacobian(res.a);
    Eigen::VectorXd grad = jac.transpose() * r;
    if (trace) *trace << "iter " << it << " cost " << res.cost << " |grad| " << grad.norm() << "\n";
    if (grad.norm() <= 1e-15 * (1.0 + r.norm())) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd step = (jac.transpose() * jac).ldlt().solve(-grad);
    double lambda = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls) {
      std::vector<double> b = res.a;
      for (Eigen::Index k = 0; k < m; ++k) b[static_cast<std::size_t>(k)] += lambda * step(k);
      double c = cost_at(b);
      if (c <= res.cost) {
        improved = c < res.cost;
        res.a = b;
        res.cost = c;
        break;
      }
      lambda *= 0.5;
    }
    double scale = 1.0;
    for (double x : res.a) scale = std::max(scale, std::fabs(x));
    if (!improved || lambda * step.norm() <= 1e-15 * scale) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace detail

/// Euclidean distance from p (ambient real coordinates) to the graphed edge.
inline EdgeProjection edge_distance(const std::vector<double>& p, const CompiledEdge& e,
                                    const EdgeProjectionOptions& opt = {}) {
  Coords c(e.n());
  if (p.size() != c.dim()) throw PreconditionError("point dimension differs from ambient dimension");
  for (double x : p)
    if (!std::isfinite(x)) throw PreconditionError("point has non-finite coordinates");
  std::vector<double> a0(static_cast<std::size_t>(e.n() + 1));
  for (int k = 0; k < e.n(); ++k) a0[static_cast<std::size_t>(k)] = p[c.x(k)];
  a0.back() = p[c.u()];
  for (double x : a0)
    if (std::fabs(x) > opt.chart_radius) throw PreconditionError("point lies outside the coordinate chart box");

  std::ostringstream trace;
  auto res = detail::gauss_newton(e, p, a0, opt.max_iterations, &trace);
  bool fallback = false;
  if (!res.converged) {
    // Grid search over a box around the start, then polish.
    fallback = true;
    const double radius = std::max(std::sqrt(res.cost), 1e-3);
    const int g = std::max(opt.grid_points, 3);
    const std::size_t m = a0.size();
    std::vector<double> best = a0;
    double best_cost = res.cost;
    std::vector<int> idx(m, 0);
    for (;;) {
      std::vector<double> b(m);
      for (std::size_t k = 0; k < m; ++k) b[k] = a0[k] - radius + 2.0 * radius * idx[k] / (g - 1);
      auto q = e.point(b);
      double s = 0;
      for (std::size_t i = 0; i < q.size(); ++i) s += (q[i] - p[i]) * (q[i] - p[i]);
      if (s < best_cost) {
        best_cost = s;
        best = b;
      }
      std::size_t k = 0;
      while (k < m && ++idx[k] == g) idx[k++] = 0;
      if (k == m) break;
    }
    trace << "fallback grid best cost " << best_cost << "\n";
    res = detail::gauss_newton(e, p, best, opt.max_iterations, &trace);
    if (!res.converged) throw NumericalError("edge projection did not converge", trace.str());
  }
  EdgeProjection out;
  out.params = res.a;
  out.foot = e.point(res.a);
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - out.foot[i]) * (p[i] - out.foot[i]);
  out.distance = std::sqrt(s);
  out.iterations = res.iterations;
  out.used_fallback = fallback;
  return out;
}

inline EdgeProjection edge_distance(const std::vector<double>& p, const EdgeModel& e,
                                    const EdgeProjectionOptions& opt = {}) {
  return edge_distance(p, CompiledEdge(e), opt);
}

}  // namespace eow

#endif  // EOW_GEOMETRY_EDGE_HPP
