#ifndef EOW_NORMAL_FORM_LEVI_HPP
#define EOW_NORMAL_FORM_LEVI_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "eow/error.hpp"
#include "eow/geometry/cones.hpp"
#include "eow/series/matrix.hpp"

namespace eow {

/// Levi form L = Lambda + i Omega on H = C^n.
struct LeviData {
  QMatrix Lambda, Omega;
  std::vector<double> eigenvalues;  // ascending
  int n_plus = 0, n_minus = 0, n_zero = 0;

  bool indefinite() const { return n_plus > 0 && n_minus > 0; }
};

/// Characteristic polynomial coefficients c_0..c_N of a square rational
/// matrix (Faddeev-LeVerrier), with c_N = 1.
inline std::vector<Scalar> characteristic_polynomial(const QMatrix& A) {
  const std::size_t N = A.rows();
  std::vector<Scalar> c(N + 1, Scalar(0));
  c[N] = 1;
  QMatrix Mk(N, N);
  for (std::size_t k = 1; k <= N; ++k) {
    QMatrix next = A * Mk;
    for (std::size_t i = 0; i < N; ++i) next(i, i) += c[N - k + 1];
    Mk = next;
    QMatrix AM = A * Mk;
    Scalar tr = 0;
    for (std::size_t i = 0; i < N; ++i) tr += AM(i, i);
    c[N - k] = -tr / static_cast<long>(k);
  }
  return c;
}

/// Exact inertia (n+, n-, n0) of a real symmetric matrix: its characteristic
/// polynomial is real-rooted, so Descartes' rule counts roots exactly.
inline std::array<int, 3> symmetric_inertia(const QMatrix& S) {
  auto c = characteristic_polynomial(S);
  int zero = 0;
  while (zero < static_cast<int>(c.size()) && c[static_cast<std::size_t>(zero)] == 0) ++zero;
  auto sign_changes = [&](bool negate_odd) {
    int changes = 0, last = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      int s = sgn(c[k]);
      if (negate_odd && k % 2 == 1) s = -s;
      if (s == 0) continue;
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    return changes;
  };
  return {sign_changes(false), sign_changes(true), zero};
}

inline LeviData levi_data(const QMatrix& Lambda, const QMatrix& Omega) {
  const std::size_t n = Lambda.rows();
  if (Lambda.cols() != n || Omega.rows() != n || Omega.cols() != n) throw PreconditionError("Levi blocks must be n x n");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (Lambda(i, j) != Lambda(j, i)) throw PreconditionError("Lambda is not symmetric");
      if (Omega(i, j) != -Omega(j, i)) throw PreconditionError("Omega is not skew");
    }
  LeviData d{Lambda, Omega, {}, 0, 0, 0};
  // Real form [[Lambda, -Omega], [Omega, Lambda]] doubles every eigenvalue of L.
  QMatrix S(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      S(i, j) = Lambda(i, j);
      S(n + i, n + j) = Lambda(i, j);
      S(i, n + j) = -Omega(i, j);
      S(n + i, j) = Omega(i, j);
    }
  auto inertia = symmetric_inertia(S);
  d.n_plus = inertia[0] / 2;
  d.n_minus = inertia[1] / 2;
  d.n_zero = inertia[2] / 2;

  Eigen::MatrixXcd L(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = {to_double(Lambda(i, j)), to_double(Omega(i, j))};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(L, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) d.eigenvalues.push_back(es.eigenvalues()(i));
  return d;
}

enum class DirectionClass { null, positive, negative };

inline std::string to_string(DirectionClass c) {
  switch (c) {
    case DirectionClass::null: return "null";
    case DirectionClass::positive: return "positive";
    case DirectionClass::negative: return "negative";
  }
  return "?";
}

struct DirectionQuality {
  DirectionClass cls;
  Scalar q;
};

/// Sign of sigma^t Lambda sigma, exact.
inline DirectionQuality levi_classify_direction(const QMatrix& Lambda, const std::vector<Scalar>& sigma) {
  if (sigma.size() != Lambda.rows()) throw PreconditionError("direction has wrong dimension");
  if (std::all_of(sigma.begin(), sigma.end(), [](const Scalar& s) { return s == 0; }))
    throw PreconditionError("direction must be nonzero");
  Scalar q = dot(sigma, Lambda * sigma);
  return {q > 0 ? DirectionClass::positive : q < 0 ? DirectionClass::negative : DirectionClass::null, q};
}

/// Float version; |q| <= tol * |sigma|^2 counts as null.
inline DirectionClass levi_classify_direction(const DMatrix& Lambda, const std::vector<double>& sigma,
                                              double tol = 1e-12) {
  if (sigma.size() != Lambda.rows()) throw PreconditionError("direction has wrong dimension");
  const double n2 = dot(sigma, sigma);
  if (n2 == 0.0) throw PreconditionError("direction must be nonzero");
  const double q = dot(sigma, Lambda * sigma) / n2;
  if (std::fabs(q) <= tol) return DirectionClass::null;
  return q > 0 ? DirectionClass::positive : DirectionClass::negative;
}

/// Outcome of the null-direction search over an open round cone.
struct NullSearch {
  std::optional<std::vector<double>> witness;  // unit vector in the open cone
  double q_axis = 0;
  // Extremes of q(axis + c) over the closed cross-section c ⊥ axis, |c| <= aperture;
  // their signs are the signs q takes on the closed cone.
  double q_min = 0, q_max = 0;
  std::vector<double> argmin, argmax;  // unit directions attaining them
  std::string method;
  std::string limitation;
};

namespace detail {

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> from_eigen(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Minimizer of c^t C c + 2 b^t c over |c| <= radius (trust-region subproblem).
inline Eigen::VectorXd trust_region_min(const Eigen::MatrixXd& C, const Eigen::VectorXd& b, double radius) {
  const Eigen::Index m = b.size();
  if (m == 0) return Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  const Eigen::VectorXd d = es.eigenvalues();
  const Eigen::MatrixXd V = es.eigenvectors();
  const Eigen::VectorXd g = V.transpose() * b;
  const double scale = std::max(1.0, C.norm());
  const double dmin = d(0);
  auto step = [&](double lambda) {
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) y(i) = d(i) + lambda > 0 ? -g(i) / (d(i) + lambda) : 0.0;
    return y;
  };
  if (dmin > 1e-14 * scale) {
    Eigen::VectorXd y = step(0.0);
    if (y.norm() <= radius) return V * y;
  }
  // Boundary solution: |y(lambda)| = radius with lambda > -dmin.
  double gsmall = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (d(i) <= dmin + 1e-12 * scale) gsmall = std::max(gsmall, std::fabs(g(i)));
  const double lo0 = std::max(0.0, -dmin);
  if (gsmall <= 1e-14 * std::max(1.0, g.norm())) {
    // Possible hard case: components along the lowest eigenspace vanish.
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) y(i) = d(i) > dmin + 1e-12 * scale ? -g(i) / (d(i) - dmin) : 0.0;
    if (y.norm() <= radius && lo0 == -dmin) {
      y(0) += std::sqrt(std::max(0.0, radius * radius - y.squaredNorm()));
      return V * y;
    }
  }
  double lo = lo0, hi = lo0 + g.norm() / radius + 1.0;
  while (step(hi).norm() > radius) hi = 2 * hi + 1;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (step(mid).norm() > radius) lo = mid;
    else hi = mid;
  }
  return V * step(hi);
}

}  // namespace detail

/// Searches the open round cone (in an orthonormal frame of N) for a null
/// direction of the quadratic form Lambda.
inline NullSearch find_null_in_cone(const DMatrix& Lambda, const RoundConeSpec& cone) {
  const std::size_t n = Lambda.rows();
  if (cone.dim() != n) throw PreconditionError("cone dimension differs from Lambda");
  cone.validate();
  Eigen::MatrixXd L(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Lambda(i, j);
  const Eigen::VectorXd s = detail::to_eigen(cone.axis);
  const double delta = cone.aperture;

  // Orthonormal basis U of the complement of the axis.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(s);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::MatrixXd U = Q.rightCols(static_cast<Eigen::Index>(n) - 1);
  const double a = s.dot(L * s);
  const Eigen::VectorXd b = U.transpose() * L * s;
  const Eigen::MatrixXd C = U.transpose() * L * U;

  auto q_of = [&](const Eigen::VectorXd& c) { return a + 2 * b.dot(c) + c.dot(C * c); };
  auto unit_dir = [&](const Eigen::VectorXd& c) { return detail::from_eigen((s + U * c).normalized()); };

  NullSearch out;
  out.q_axis = a;
  const double scale = std::max(1.0, L.norm());
  if (L.isZero(0.0) || a == 0.0) {
    out.witness = cone.axis;
    out.method = L.isZero(0.0) ? "zero form" : "axis is null";
  }

  Eigen::VectorXd cmin, cmax;
  if (n == 2) {
    // q(c) = a + 2 b c + C c^2 on c in (-delta, delta).
    const double bb = b(0), cc = C(0, 0);
    std::vector<double> cand{-delta, delta};
    if (cc != 0.0 && std::fabs(bb / cc) <= delta) cand.push_back(-bb / cc);
    double best_lo = INFINITY, best_hi = -INFINITY, clo = 0, chi = 0;
    for (double x : cand) {
      Eigen::VectorXd v(1);
      v(0) = x;
      double qv = q_of(v);
      if (qv < best_lo) best_lo = qv, clo = x;
      if (qv > best_hi) best_hi = qv, chi = x;
    }
    cmin = Eigen::VectorXd::Constant(1, clo);
    cmax = Eigen::VectorXd::Constant(1, chi);
    if (!out.witness) {
      out.method = "exact quadratic in the cone parameter";
      std::vector<double> roots;
      if (cc == 0.0) {
        if (bb != 0.0) roots.push_back(-a / (2 * bb));
      } else {
        const double disc = bb * bb - a * cc;
        if (disc >= 0.0) {
          const double sq = std::sqrt(disc);
          const double qq = -(bb + std::copysign(sq, bb));
          if (qq != 0.0) {
            roots.push_back(qq / cc);
            roots.push_back(a / qq);
          } else {
            roots.push_back(0.0);
          }
        }
      }
      std::sort(roots.begin(), roots.end(), [](double x, double y) { return std::fabs(x) < std::fabs(y); });
      for (double rt : roots)
        if (std::fabs(rt) < delta) {
          out.witness = unit_dir(Eigen::VectorXd::Constant(1, rt));
          break;
        }
    }
  } else {
    cmin = detail::trust_region_min(C, b, delta);
    cmax = detail::trust_region_min(-C, -b, delta);
    if (!out.witness) {
      out.method = "trust-region extremes over the cone cross-section";
      out.limitation =
          "presence is decided from the sign of the extremes; a null direction touching the cone only at an "
          "extremum on its boundary (tangential zero) is not reported";
      const double lo = q_of(cmin), hi = q_of(cmax);
      if (lo < 0.0 && hi > 0.0) {
        // Root of the quadratic q along the segment between shrunken extremizers.
        const Eigen::VectorXd p0 = cmin * (1 - 1e-9), p1 = cmax * (1 - 1e-9);
        const Eigen::VectorXd dvec = p1 - p0;
        const double A2 = dvec.dot(C * dvec), A1 = 2 * (b.dot(dvec) + p0.dot(C * dvec)), A0 = q_of(p0);
        double tstar = 0.5;
        if (std::fabs(A2) <= 1e-300) {
          tstar = -A0 / A1;
        } else {
          const double disc = std::max(0.0, A1 * A1 - 4 * A2 * A0);
          const double r1 = (-A1 - std::sqrt(disc)) / (2 * A2), r2 = (-A1 + std::sqrt(disc)) / (2 * A2);
          tstar = (r1 >= 0 && r1 <= 1) ? r1 : r2;
        }
        out.witness = unit_dir(p0 + tstar * dvec);
      } else if ((std::fabs(lo) <= 1e-14 * scale && cmin.norm() < delta * (1 - 1e-12)) ||
                 (std::fabs(hi) <= 1e-14 * scale && cmax.norm() < delta * (1 - 1e-12))) {
        out.witness = unit_dir(std::fabs(lo) <= 1e-14 * scale ? cmin : cmax);
      }
    }
  }
  out.q_min = q_of(cmin);
  out.q_max = q_of(cmax);
  out.argmin = unit_dir(cmin);
  out.argmax = unit_dir(cmax);
  return out;
}

}  // namespace eow

#endif  // EOW_NORMAL_FORM_LEVI_HPP
