#ifndef EOW_DISCS_SLICE_HPP
#define EOW_DISCS_SLICE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eow/error.hpp"
#include "eow/geometry/wedge.hpp"
#include "eow/normal_form/classify.hpp"
#include "eow/screens/constants.hpp"

namespace eow {

/// Working box |xi| <= xi_radius, |eta1| <= eta_radius for the slice bounds.
struct SliceBox {
  Scalar xi_radius{1, 4};
  Scalar eta_radius{1, 4};
  int audit_samples = 2000;
  std::uint64_t seed = 0;
};

/// Restriction of M to the plane Pi_t = {z = zeta_1 (1, t), w = zeta_2},
/// zeta_1 = xi_1 + i eta_1, zeta_2 = xi_2 + i eta_2, written as
/// eta_2 = chi(xi, eta_1) with chi = Q eta1^2 + a + b eta1 + c eta1^2 + d eta1^3.
struct SliceModel {
  int n = 2;
  int cap = 6;
  std::vector<Scalar> t;
  Scalar Q;
  TruncatedPoly chi;             // xi1, xi2, eta1
  TruncatedPoly a, b, c;         // xi1, xi2
  TruncatedPoly d;               // xi1, xi2, eta1
  std::vector<TruncatedPoly> Y;  // xi1, xi2
  TruncatedPoly V;
  SliceBox box;
  Scalar Lambda_norm;  // sum of |Lambda_jk|
  Scalar A, B, A_tilde, A_prime;
  Scalar A_coefficient, B_coefficient;
  double A_sampled = 0, B_sampled = 0;
};

namespace detail {

inline Vars slice_vars() { return {"xi1", "xi2", "eta1"}; }
inline Vars xi_vars() { return {"xi1", "xi2"}; }

inline Scalar qpow(const Scalar& x, int k) {
  Scalar r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

/// Sum of |c| rho_xi^(deg_xi - k) rho_eta^(deg_eta): bounds |p| / |xi|^k on
/// the box since |xi^e| <= |xi|^|e|. Every term must have xi-degree >= k.
inline Scalar ratio_bound(const TruncatedPoly& p, int k, const Scalar& rho_xi, const Scalar& rho_eta,
                          const std::string& name) {
  Scalar s = 0;
  for (const auto& [e, c] : p.terms()) {
    const int dx = e[0] + e[1];
    const int de = e.size() > 2 ? e[2] : 0;
    if (dx < k) throw NumericalError(name + " has a term of xi-degree " + std::to_string(dx) + " < " + std::to_string(k));
    s += abs(c) * qpow(rho_xi, dx - k) * qpow(rho_eta, de);
  }
  return s;
}

/// |xi|^4 = (xi1^2 + xi2^2)^2 over the given variables.
inline TruncatedPoly xi_norm4(const Vars& vars, int cap) {
  auto x1 = TruncatedPoly::variable(vars, cap, "xi1"), x2 = TruncatedPoly::variable(vars, cap, "xi2");
  auto s = x1 * x1 + x2 * x2;
  return s * s;
}

/// Drops the eta1 variable from a polynomial that does not use it.
inline TruncatedPoly xi_only(const TruncatedPoly& p) {
  TruncatedPoly out(xi_vars(), p.cap());
  for (const auto& [e, c] : p.terms()) out.add_term({e[0], e[1]}, c);
  return out;
}

inline double xi_abs(double x1, double x2) { return std::hypot(x1, x2); }

}  // namespace detail

inline SliceModel build_slice(const NormalFormData& nf, const std::vector<Scalar>& t, const SliceBox& box = {}) {
  const int n = nf.n, cap = nf.cap;
  if (t.size() != static_cast<std::size_t>(n - 1)) throw PreconditionError("slice parameter t needs n-1 components");
  Scalar t2 = 0;
  for (const auto& x : t) t2 += x * x;
  if (t2 > 1) throw PreconditionError("slice parameter |t| > 1");
  if (box.xi_radius <= 0 || box.eta_radius <= 0) throw PreconditionError("slice box radii must be positive");

  Coords c(n);
  const Vars sv = detail::slice_vars();
  SliceModel s;
  s.n = n;
  s.cap = cap;
  s.t = t;
  s.box = box;
  std::vector<Scalar> one_t{Scalar(1)};
  one_t.insert(one_t.end(), t.begin(), t.end());
  s.Q = 0;
  s.Lambda_norm = 0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      s.Q += one_t[j] * nf.Lambda(j, k) * one_t[k];
      s.Lambda_norm += abs(nf.Lambda(j, k));
    }

  // Quadratic part of h must be y^t Lambda y + x^t Omega y.
  TruncatedPoly quad(c.graph(), cap);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      auto yj = TruncatedPoly::variable(c.graph(), cap, c.graph()[c.y(j)]);
      auto yk = TruncatedPoly::variable(c.graph(), cap, c.graph()[c.y(k)]);
      auto xj = TruncatedPoly::variable(c.graph(), cap, c.graph()[c.x(j)]);
      quad += yj * yk * nf.Lambda(j, k) + xj * yk * nf.Omega(j, k);
    }
  if (nf.h.degree_range(0, 2) != quad) throw NumericalError("graph is not in normal form up to order two");
  const TruncatedPoly phi = nf.h.degree_range(3, cap);

  PolyMap psi{sv, c.graph(), {}};
  const auto xi1 = TruncatedPoly::variable(sv, cap, "xi1"), xi2 = TruncatedPoly::variable(sv, cap, "xi2"),
             eta1 = TruncatedPoly::variable(sv, cap, "eta1");
  for (int k = 0; k < n; ++k) psi.components.push_back(xi1 * one_t[k]);
  for (int k = 0; k < n; ++k) psi.components.push_back(eta1 * one_t[k]);
  psi.components.push_back(xi2);
  const TruncatedPoly phi_t = compose_truncated(phi, psi, cap);
  s.chi = eta1 * eta1 * s.Q + phi_t;

  s.a = TruncatedPoly(detail::xi_vars(), cap);
  s.b = s.a;
  s.c = s.a;
  s.d = TruncatedPoly(sv, cap);
  for (const auto& [e, coef] : phi_t.terms()) {
    switch (e[2]) {
      case 0: s.a.add_term({e[0], e[1]}, coef); break;
      case 1: s.b.add_term({e[0], e[1]}, coef); break;
      case 2: s.c.add_term({e[0], e[1]}, coef); break;
      default: s.d.add_term({e[0], e[1], static_cast<std::uint8_t>(e[2] - 3)}, coef);
    }
  }
  {
    auto lift = [&](const TruncatedPoly& p) { return embed_vars(p, sv); };
    TruncatedPoly back = eta1 * eta1 * s.Q + lift(s.a) + lift(s.b) * eta1 + lift(s.c) * eta1 * eta1 +
                         s.d * eta1 * eta1 * eta1;
    if (back != s.chi) throw NumericalError("chi does not reassemble from its eta1 expansion");
  }

  const Vars xv = detail::xi_vars();
  PolyMap epsi{xv, c.edge(), {}};
  for (int k = 0; k < n; ++k) epsi.components.push_back(TruncatedPoly::variable(xv, cap, "xi1") * one_t[k]);
  epsi.components.push_back(TruncatedPoly::variable(xv, cap, "xi2"));
  for (const auto& f : nf.edge.f) s.Y.push_back(compose_truncated(f, epsi, cap));
  s.V = compose_truncated(nf.edge.g, epsi, cap);

  const Scalar& rx = box.xi_radius;
  const Scalar& re = box.eta_radius;
  Scalar Ad = 0;
  TruncatedPoly dk = s.d;
  for (int k = 0; k <= 2; ++k) {
    Ad = std::max(Ad, detail::ratio_bound(dk, 0, rx, re, "d"));
    dk = dk.derivative("eta1");
  }
  s.A_coefficient = std::max<Scalar>({detail::ratio_bound(s.a, 4, rx, re, "a"), detail::ratio_bound(s.b, 2, rx, re, "b"),
                                      detail::ratio_bound(s.c, 1, rx, re, "c"), Ad});
  Scalar By = 0;
  for (const auto& y : s.Y) By += detail::ratio_bound(y, 4, rx, re, "Y");
  s.B_coefficient = std::max(By, detail::ratio_bound(s.V, 4, rx, re, "V"));

  // Sample audit of the same ratios.
  const CompiledPoly ca(s.a), cb(s.b), cc(s.c), cd0(s.d), cd1(s.d.derivative("eta1")),
      cd2(s.d.derivative("eta1").derivative("eta1")), cv(s.V);
  std::vector<CompiledPoly> cy;
  for (const auto& y : s.Y) cy.emplace_back(y);
  std::mt19937_64 rng(box.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0), sym(-1.0, 1.0);
  const double rxd = to_double(rx), red = to_double(re);
  for (int i = 0; i < box.audit_samples; ++i) {
    const double rad = rxd * std::sqrt(u01(rng)), ang = 2 * M_PI * u01(rng), e1 = red * sym(rng);
    if (rad == 0.0) continue;
    const double x1 = rad * std::cos(ang), x2 = rad * std::sin(ang);
    const double r2 = rad * rad;
    const std::vector<double> xi{x1, x2}, xe{x1, x2, e1};
    s.A_sampled = std::max({s.A_sampled, std::fabs(ca(xi)) / (r2 * r2), std::fabs(cb(xi)) / r2,
                            std::fabs(cc(xi)) / rad, std::fabs(cd0(xe)), std::fabs(cd1(xe)), std::fabs(cd2(xe))});
    double ysum = 0;
    for (const auto& y : cy) ysum += y(xi) * y(xi);
    s.B_sampled = std::max({s.B_sampled, std::sqrt(ysum) / (r2 * r2), std::fabs(cv(xi)) / (r2 * r2)});
  }
  const double slack = 1 + 1e-9;
  if (s.A_sampled > to_double(s.A_coefficient) * slack + 1e-300 ||
      s.B_sampled > to_double(s.B_coefficient) * slack + 1e-300)
    throw NumericalError("sampled slice ratio exceeds its coefficient bound");
  s.A = std::max(s.A_coefficient, Scalar(s.A_sampled));
  s.B = std::max(s.B_coefficient, Scalar(s.B_sampled));

  // With eps <= 1 and K >= 1: |eta1| <= (1+B)(eta1 - Y1) and |xi|^2 <= sqrt(eps).
  const Scalar one_b = 1 + s.B;
  s.A_tilde = s.A * one_b + (2 * s.Lambda_norm + s.A * (2 + s.B)) * one_b * one_b;
  s.A_prime = s.A * (re * re + 6 * re + 6);
  return s;
}

struct EdgeTrace {
  std::vector<double> Y;
  double V = 0;
  double margin = 0;  // B|xi|^4 - max(|Y|, |V|)
};

inline EdgeTrace edge_trace(const SliceModel& s, double xi1, double xi2) {
  const double r = detail::xi_abs(xi1, xi2);
  if (r > to_double(s.box.xi_radius) * (1 + 1e-15)) throw PreconditionError("xi outside the slice box");
  const std::vector<double> xi{xi1, xi2};
  EdgeTrace out;
  double ysum = 0;
  for (const auto& y : s.Y) {
    out.Y.push_back(CompiledPoly(y)(xi));
    ysum += out.Y.back() * out.Y.back();
  }
  out.V = CompiledPoly(s.V)(xi);
  out.margin = to_double(s.B) * r * r * r * r - std::max(std::sqrt(ysum), std::fabs(out.V));
  if (out.margin < -1e-15 * std::max(1.0, to_double(s.B)))
    throw NumericalError("edge trace exceeds its certified bound B|xi|^4");
  return out;
}

/// Largest power of two c <= 1 with c <= xi_radius^2 and c^2 (1 + B) <= eta_radius:
/// keeps the minwedge region inside the slice box.
inline Scalar slice_root_eps_cap(const SliceModel& s) {
  Scalar c = 1;
  const Scalar rx2 = s.box.xi_radius * s.box.xi_radius;
  while (c > rx2 || c * c * (1 + s.B) > s.box.eta_radius) c /= 2;
  return c;
}

struct MinwedgeConstants {
  Scalar delta, gamma, eps, root_eps, K;
  std::vector<InequalityCheck> audit;
  bool all_hold() const {
    return std::all_of(audit.begin(), audit.end(), [](const InequalityCheck& c) { return c.holds; });
  }
};

inline std::vector<InequalityCheck> minwedge_audit(const MinwedgeConstants& m, const Scalar& A, const Scalar& B,
                                                   const Scalar& A_tilde, const Scalar& root_cap) {
  return {
      make_check("gamma <= delta/4", m.gamma, "<=", m.delta / 4),
      make_check("K >= 8B/delta", m.K, ">=", 8 * B / m.delta),
      make_check("A~ sqrt(eps) <= delta/4", A_tilde * m.root_eps, "<=", m.delta / 4),
      make_check("K >= 4(A+B+A~ B sqrt(eps))/delta", m.K, ">=", 4 * (A + B + A_tilde * B * m.root_eps) / m.delta),
      make_check("eps = sqrt(eps)^2", m.eps, "<=", m.root_eps * m.root_eps),
      make_check("eps <= 1", m.eps, "<=", 1),
      make_check("K >= 1", m.K, ">=", 1),
      make_check("sqrt(eps) <= box cap", m.root_eps, "<=", root_cap),
  };
}

/// gamma = delta/4, sqrt(eps) = min(cap, delta/(4 A~)),
/// K = max(1, 8B/delta, 4(A + B + A~ B sqrt(eps))/delta).
inline MinwedgeConstants minwedge_constants(const Scalar& delta, const Scalar& A, const Scalar& B,
                                            const Scalar& A_tilde, const Scalar& root_cap = 1) {
  if (delta <= 0 || A < 0 || B < 0 || A_tilde < 0 || root_cap <= 0)
    throw PreconditionError("minwedge constants need delta > 0 and nonnegative A, B, A~");
  MinwedgeConstants m;
  m.delta = delta;
  m.gamma = delta / 4;
  m.root_eps = A_tilde == 0 ? root_cap : std::min<Scalar>(root_cap, delta / (4 * A_tilde));
  m.root_eps = std::min<Scalar>(m.root_eps, 1);
  m.eps = m.root_eps * m.root_eps;
  m.K = std::max<Scalar>({Scalar(1), 8 * B / delta, 4 * (A + B + A_tilde * B * m.root_eps) / delta});
  m.audit = minwedge_audit(m, A, B, A_tilde, root_cap);
  return m;
}

struct ShrunkWedge {
  WedgeSpec wedge;
  double kappa = 0;  // balls of radius kappa * dist(z, E) around z in the shrunk wedge stay in the original
};

inline ShrunkWedge shrink_wedge(const WedgeSpec& W) {
  W.validate();
  ShrunkWedge s{W, 0};
  s.wedge.aperture = W.aperture / 2;
  s.wedge.extent = W.extent / 2;
  const double a = W.aperture;
  s.kappa = a / (2 * (1 + a) * std::sqrt(1 + a * a / 4));
  return s;
}

/// Round cone in normal coordinates whose image under the linear frame lies
/// in the input cone. With orthogonal frame columns the aperture is
/// delta min(1, |R e| / max |R e_i|) (exact when the ratio is a rational
/// square); otherwise the bound delta |R e| / (sqrt(1 + delta^2) |R P|) with
/// P the projection off the axis.
struct NormalCone {
  WedgeSpec wedge;           // over nf.edge, axis the normal image of the input axis
  Scalar aperture;
  double extent = 0;
  bool orthogonal = false;   // frame columns pairwise orthogonal
  std::vector<Scalar> axis;  // y-coordinates of R^{-1} sigma
};

namespace detail {

inline std::optional<Scalar> rational_sqrt(const Scalar& q) {
  if (q < 0) return std::nullopt;
  mpz_class a = sqrt(mpz_class(q.get_num())), b = sqrt(mpz_class(q.get_den()));
  if (a * a != q.get_num() || b * b != q.get_den()) return std::nullopt;
  Scalar r(a, b);
  r.canonicalize();
  return r;
}

}  // namespace detail

inline NormalCone normal_cone(const NormalFormData& nf, const std::vector<Scalar>& sigma, double aperture,
                              double extent, Sides sides = Sides::two) {
  Coords c(nf.n);
  const auto n = static_cast<std::size_t>(nf.n);
  if (sigma.size() != c.dim()) throw PreconditionError("cone axis must be an ambient vector");
  const auto s_full = *inverse(nf.frame.R) * sigma;
  NormalCone out;
  for (std::size_t k = 0; k < c.dim(); ++k) {
    if (k >= n && k < 2 * n) out.axis.push_back(s_full[k]);
    else if (s_full[k] != 0) throw PreconditionError("cone axis is not a CR-normal direction");
  }
  const QMatrix G = nf.frame.R.transpose() * nf.frame.R;
  out.orthogonal = true;
  for (std::size_t i = 0; i < c.dim(); ++i)
    for (std::size_t j = 0; j < c.dim(); ++j)
      if (i != j && G(i, j) != 0) out.orthogonal = false;

  const DMatrix Rd = to_double(nf.frame.R);
  Eigen::MatrixXd R(static_cast<Eigen::Index>(c.dim()), static_cast<Eigen::Index>(c.dim()));
  for (std::size_t i = 0; i < c.dim(); ++i)
    for (std::size_t j = 0; j < c.dim(); ++j) R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Rd(i, j);
  const double rnorm = Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues()(0);
  std::size_t nonzero = 0, which = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (out.axis[k] != 0) ++nonzero, which = k;
  if (out.orthogonal && nonzero == 1) {
    const std::size_t e = n + which;
    Scalar gmax = 0;
    for (std::size_t i = 0; i < c.dim(); ++i)
      if (i != e) gmax = std::max(gmax, G(i, i));
    const Scalar ratio = G(e, e) / gmax;
    if (ratio >= 1) out.aperture = Scalar(aperture);
    else if (auto r = detail::rational_sqrt(ratio)) out.aperture = Scalar(aperture) * *r;
    else out.aperture = Scalar(aperture * std::sqrt(to_double(ratio)) * (1 - 1e-12));
  } else {
    out.orthogonal = false;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.dim()));
    for (std::size_t k = 0; k < n; ++k) e(static_cast<Eigen::Index>(n + k)) = to_double(out.axis[k]);
    e.normalize();
    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(e.size(), e.size()) - e * e.transpose();
    const double pn = Eigen::JacobiSVD<Eigen::MatrixXd>(R * P).singularValues()(0);
    const double bound = aperture * (R * e).norm() / (std::sqrt(1 + aperture * aperture) * pn);
    out.aperture = Scalar(bound * (1 - 1e-12));
  }
  out.extent = extent / rnorm * (1 - 1e-12);

  out.wedge.edge = nf.edge;
  for (const auto& a : out.axis) out.wedge.axis.push_back(TruncatedPoly::constant(c.edge(), nf.cap, a));
  out.wedge.aperture = to_double(out.aperture);
  out.wedge.extent = out.extent;
  out.wedge.sides = sides;
  return out;
}

struct MinwedgeReport {
  int samples = 0;
  int in_region = 0;
  int excluded = 0;
  int failures = 0;
  // Smallest margins relative to eta1 - Y1.
  double min_wedge_margin = std::numeric_limits<double>::infinity();
  double min_tangential_margin = std::numeric_limits<double>::infinity();  // (delta/2) s - |eta1 t - Y'|
  double min_proof_margin = std::numeric_limits<double>::infinity();       // (gamma + 2B/K) s - |eta1 t - Y'|
  double min_normal_margin = std::numeric_limits<double>::infinity();      // (delta/2) s - |eta2 - V|
  double max_comparability = 0;  // distance to E over eta1 - Y1
  double min_comparability = std::numeric_limits<double>::infinity();
  std::string first_failure;
  bool passed() const { return failures == 0 && in_region > 0; }
};

/// Samples the region K|xi|^4 < eta1 - Y1 <= eps on the slice and checks that
/// each point of M lands on the plus side of the normal-coordinate wedge.
inline MinwedgeReport minwedge_check(const SliceModel& s, const NormalFormData& nf, const NormalCone& cone,
                                     const MinwedgeConstants& mc, int samples, std::uint64_t seed = 0) {
  Scalar t2 = 0;
  for (const auto& x : s.t) t2 += x * x;
  if (t2 > mc.gamma * mc.gamma) throw PreconditionError("minwedge check needs |t| <= gamma");
  Coords c(s.n);
  const CompiledWedge W(cone.wedge);
  const CompiledPoly h(nf.h), chi(s.chi);
  std::vector<CompiledPoly> cy;
  for (const auto& y : s.Y) cy.emplace_back(y);
  const CompiledPoly cv(s.V);
  const double eps = to_double(mc.eps), K = to_double(mc.K), delta = to_double(mc.delta),
               gamma = to_double(mc.gamma), B = to_double(s.B);
  std::vector<double> tt;
  for (const auto& x : s.t) tt.push_back(to_double(x));
  const double rho = std::pow(eps / K, 0.25);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  WedgeSideOptions opt;
  opt.graph_tolerance = 1e-9;
  MinwedgeReport rep;
  rep.samples = samples;
  for (int i = 0; i < samples; ++i) {
    const double rad = rho * std::sqrt(u01(rng)), ang = 2 * M_PI * u01(rng);
    const double x1 = rad * std::cos(ang), x2 = rad * std::sin(ang), r4 = rad * rad * rad * rad;
    const std::vector<double> xi{x1, x2};
    const double lo = K * r4;
    double sv;
    if (i % 10 == 9) sv = eps * (1 + 0.5 * u01(rng));
    else if (i % 2 == 0) sv = lo + (eps - lo) * u01(rng);
    else sv = lo + (eps - lo) * std::pow(10.0, -8 * u01(rng));
    std::vector<double> Y;
    for (const auto& y : cy) Y.push_back(y(xi));
    const double eta1 = Y[0] + sv;
    const double s_true = eta1 - Y[0];
    if (!(s_true > lo && s_true <= eps)) {
      ++rep.excluded;
      continue;
    }
    ++rep.in_region;
    const double eta2 = chi(std::vector<double>{x1, x2, eta1});
    std::vector<double> p(c.dim(), 0.0);
    for (int k = 0; k < s.n; ++k) {
      const double w = k == 0 ? 1.0 : tt[static_cast<std::size_t>(k - 1)];
      p[c.x(k)] = x1 * w;
      p[c.y(k)] = eta1 * w;
    }
    p[c.u()] = x2;
    p[c.v()] = eta2;

    double tang2 = 0;
    for (int k = 1; k < s.n; ++k) {
      const double d = eta1 * tt[static_cast<std::size_t>(k - 1)] - Y[static_cast<std::size_t>(k)];
      tang2 += d * d;
    }
    const double tang = std::sqrt(tang2), normal = std::fabs(eta2 - cv(xi));
    const double m_t = (delta / 2 * s_true - tang) / s_true, m_p = ((gamma + 2 * B / K) * s_true - tang) / s_true,
                 m_n = (delta / 2 * s_true - normal) / s_true;
    const WedgeSideResult side = wedge_side(W, h, p, opt);
    const double m_w = side.margin / s_true;
    rep.min_tangential_margin = std::min(rep.min_tangential_margin, m_t);
    rep.min_proof_margin = std::min(rep.min_proof_margin, m_p);
    rep.min_normal_margin = std::min(rep.min_normal_margin, m_n);
    if (side.side == Side::plus) rep.min_wedge_margin = std::min(rep.min_wedge_margin, m_w);
    else rep.min_wedge_margin = std::min(rep.min_wedge_margin, -std::fabs(m_w));
    const double ratio = side.projection.distance / s_true;
    rep.max_comparability = std::max(rep.max_comparability, ratio);
    rep.min_comparability = std::min(rep.min_comparability, ratio);

    std::string failed;
    if (side.side != Side::plus) failed = "wedge side is " + to_string(side.side);
    else if (m_t <= 0) failed = "|eta1 t - Y'| < (delta/2)(eta1 - Y1)";
    else if (m_p < -1e-12) failed = "|eta1 t - Y'| <= (gamma + 2B/K)(eta1 - Y1)";
    else if (m_n <= 0) failed = "|eta2 - V| < (delta/2)(eta1 - Y1)";
    if (!failed.empty()) {
      if (rep.failures++ == 0) {
        std::ostringstream os;
        os.precision(17);
        os << failed << " at xi = (" << x1 << ", " << x2 << "), eta1 = " << eta1 << ", eta2 = " << eta2;
        rep.first_failure = os.str();
      }
    }
  }
  return rep;
}

struct SpikeFitOptions {
  Scalar alpha{1, 4};  // hull constant: S_t has eta2-thickness alpha (eta1 - Y1)^2
  int samples = 2000;
  int remainder_samples = 2000;
  std::uint64_t seed = 0;
};

struct GrowthAudit {
  std::array<double, 3> exponent{};  // fitted log-log slopes for q1, q2, m
  std::array<bool, 3> zero{};        // identically zero on the audit radii
  std::array<int, 3> expected{4, 4, 2};
  bool passed() const {
    for (int k = 0; k < 3; ++k)
      if (!zero[static_cast<std::size_t>(k)] &&
          exponent[static_cast<std::size_t>(k)] < expected[static_cast<std::size_t>(k)] - 0.2)
        return false;
    return true;
  }
};

struct SpikeFit {
  SpikeFamily family;  // q1, q2, m over xi1, xi2
  Scalar alpha, alpha_hat, beta, ell, r;
  Scalar growth;       // A with |q1|, |m| <= A|xi|^2 and |q2| <= A|xi|^4 on |xi| <= r
  int samples = 0, in_spike = 0, failures = 0;
  double min_margin = std::numeric_limits<double>::infinity();  // relative to (eta1 - Y1)^2
  int remainder_samples = 0, remainder_failures = 0;
  double min_remainder_margin = std::numeric_limits<double>::infinity();
  GrowthAudit growth_audit;
  std::string first_failure;
  bool passed() const { return failures == 0 && remainder_failures == 0 && growth_audit.passed(); }
};

/// q1 = Y1 + K|xi|^4, q2 = chi(q1), m = d chi/d eta1 (q1); the spike
/// constants beta = alpha_hat = alpha/4 and the largest dyadic r, ell with
///   r <= box, K r^4 <= eps/2, A r <= alpha/8, A'(B+K) r^4 <= alpha/16,
///   ell <= eps/2, A' ell <= alpha/16, ell + (B+K) r^4 <= eta box.
inline SpikeFit spike_fit(const SliceModel& s, const MinwedgeConstants& mc, const SpikeFitOptions& opt = {}) {
  SpikeFit out;
  out.alpha = opt.alpha;
  out.alpha_hat = opt.alpha / 4;
  out.beta = opt.alpha / 4;
  if (opt.alpha <= 0) throw PreconditionError("hull constant alpha must be positive");
  if (abs(s.Q) > out.alpha_hat)
    throw PreconditionError("|Q(t)| = " + to_string(abs(s.Q)) + " exceeds alpha^ = " + to_string(out.alpha_hat));

  const int big = s.cap * s.cap;
  const Vars xv = detail::xi_vars(), sv = detail::slice_vars();
  TruncatedPoly q1 = s.Y[0].with_cap(big) + detail::xi_norm4(xv, big) * mc.K;
  PolyMap at_q1{xv, sv,
                {TruncatedPoly::variable(xv, big, "xi1"), TruncatedPoly::variable(xv, big, "xi2"), q1}};
  out.family.q1 = q1;
  out.family.q2 = compose_truncated(s.chi.with_cap(big), at_q1, big);
  out.family.m = compose_truncated(s.chi.derivative("eta1").with_cap(big), at_q1, big);

  const Scalar& A = s.A;
  const Scalar& Ap = s.A_prime;
  const Scalar BK = s.B + mc.K;
  const Scalar& al = opt.alpha;
  Scalar r = 1;
  auto r_ok = [&](const Scalar& x) {
    const Scalar x4 = x * x * x * x;
    return x <= s.box.xi_radius && mc.K * x4 <= mc.eps / 2 && A * x <= al / 8 && Ap * BK * x4 <= al / 16;
  };
  while (!r_ok(r)) r /= 2;
  const Scalar r4 = r * r * r * r;
  Scalar ell = 1;
  auto ell_ok = [&](const Scalar& x) { return x <= mc.eps / 2 && Ap * x <= al / 16 && x + BK * r4 <= s.box.eta_radius; };
  while (!ell_ok(ell)) ell /= 2;
  out.r = r;
  out.ell = ell;

  const Scalar zero = 0;
  out.growth = std::max<Scalar>({detail::ratio_bound(q1, 2, r, zero, "q1"), detail::ratio_bound(out.family.q2, 4, r, zero, "q2"),
                                 detail::ratio_bound(out.family.m, 2, r, zero, "m")});

  // Taylor coefficients of chi in eta1 at q1, orders >= 2, so eta2 - chi(eta1)
  // is formed without cancellation.
  std::vector<CompiledPoly> taylor;
  {
    TruncatedPoly dk = s.chi.derivative("eta1").derivative("eta1");
    Scalar fact = 2;
    for (int k = 2; !dk.is_zero(); ++k) {
      taylor.emplace_back(compose_truncated(dk.with_cap(big), at_q1, big) * (1 / fact));
      dk = dk.derivative("eta1");
      fact *= k + 1;
    }
  }
  const CompiledPoly cq1(q1), cq2(out.family.q2), cm(out.family.m);
  const double rd = to_double(r), ld = to_double(ell), bd = to_double(out.beta), ad = to_double(al),
               eps = to_double(mc.eps), K = to_double(mc.K);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0), sym(-1.0, 1.0);

  // Spike points at xi lie in S_t.
  out.samples = opt.samples;
  for (int i = 0; i < opt.samples; ++i) {
    const double rad = rd * std::sqrt(u01(rng)), ang = 2 * M_PI * u01(rng);
    const double x1 = rad * std::cos(ang), x2 = rad * std::sin(ang), r4d = rad * rad * rad * rad;
    const std::vector<double> xi{x1, x2};
    double sp = i % 2 == 0 ? ld * u01(rng) : ld * std::pow(10.0, -6 * u01(rng));
    if (sp == 0.0) sp = ld * 1e-6;
    const double q1v = cq1(xi), q2v = cq2(xi), mv = cm(xi);
    const double w = sym(rng) * bd * sp * sp;
    const double b = mv * sp + w;
    if (std::hypot(sp, b) >= ld) continue;
    ++out.in_spike;
    const double eta1 = q1v + sp, eta2 = q2v + b;
    const double s_t = K * r4d + sp;
    double rem = 0, pw = sp * sp;
    for (const auto& tk : taylor) {
      rem += tk(xi) * pw;
      pw *= sp;
    }
    const double thick = ad * s_t * s_t - std::fabs(w - rem);
    const double m = std::min({(s_t - K * r4d) / s_t, (eps - s_t) / eps, thick / (s_t * s_t)});
    out.min_margin = std::min(out.min_margin, m);
    if (!(m > 0)) {
      if (out.failures++ == 0) {
        std::ostringstream os;
        os.precision(17);
        os << "spike point outside S_t at xi = (" << x1 << ", " << x2 << "), eta = (" << eta1 << ", " << eta2
           << ")";
        out.first_failure = os.str();
      }
    }
  }

  // |d^2 chi / d eta1^2 (xi, lambda)| <= 2|Q| + 2A|xi| + A'|lambda|.
  const CompiledPoly d2(s.chi.derivative("eta1").derivative("eta1"));
  const double Qd = std::fabs(to_double(s.Q)), Ad = to_double(A), Apd = to_double(Ap), red = to_double(s.box.eta_radius);
  out.remainder_samples = opt.remainder_samples;
  for (int i = 0; i < opt.remainder_samples; ++i) {
    const double rad = rd * std::sqrt(u01(rng)), ang = 2 * M_PI * u01(rng), lam = red * sym(rng);
    const double bound = 2 * Qd + 2 * Ad * rad + Apd * std::fabs(lam);
    const double val = std::fabs(d2(std::vector<double>{rad * std::cos(ang), rad * std::sin(ang), lam}));
    const double m = bound - val;
    out.min_remainder_margin = std::min(out.min_remainder_margin, m);
    if (m < -1e-12 * std::max(1.0, bound)) {
      if (out.remainder_failures++ == 0 && out.first_failure.empty())
        out.first_failure = "second-order remainder bound fails at lambda = " + std::to_string(lam);
    }
  }

  // Log-log growth on |xi| in [1e-3, 1e-1].
  const CompiledPoly* polys[3] = {&cq1, &cq2, &cm};
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> lx, ly;
    for (int j = 0; j < 25; ++j) {
      const double rad = std::pow(10.0, -3 + 2.0 * j / 24);
      double mx = 0;
      for (int a = 0; a < 8; ++a) {
        const double ang = a * M_PI / 4 + 0.1;
        mx = std::max(mx, std::fabs((*polys[k])(std::vector<double>{rad * std::cos(ang), rad * std::sin(ang)})));
      }
      if (mx > 0) {
        lx.push_back(std::log(rad));
        ly.push_back(std::log(mx));
      }
    }
    if (lx.size() < 2) {
      out.growth_audit.zero[k] = true;
      continue;
    }
    double mxv = 0, myv = 0;
    for (std::size_t j = 0; j < lx.size(); ++j) mxv += lx[j], myv += ly[j];
    mxv /= static_cast<double>(lx.size());
    myv /= static_cast<double>(lx.size());
    double num = 0, den = 0;
    for (std::size_t j = 0; j < lx.size(); ++j) num += (lx[j] - mxv) * (ly[j] - myv), den += (lx[j] - mxv) * (lx[j] - mxv);
    out.growth_audit.exponent[k] = num / den;
  }
  return out;
}

struct SweepConfig {
  SliceBox box;
  Scalar alpha{1, 4};
  int t_points = 5;  // per slice coordinate, on [-radius, radius]
  int minwedge_samples = 2000;
  int spike_samples = 2000;
  int union_samples = 20000;
  std::vector<int> signs{1, -1};            // sides of the axis to run
  std::vector<std::vector<Scalar>> t_list;  // explicit slices; empty = grid on [-radius, radius]
  std::uint64_t seed = 0;
};

struct SweepSlice {
  std::vector<Scalar> t;
  Scalar Q, A, B, A_tilde, A_prime;
  MinwedgeConstants minwedge;
  MinwedgeReport minwedge_report;
  SpikeFit fit;
  SpikeConstants spike;
  SpikeUnionReport spike_union;
  Scalar delta;
  bool passed() const {
    return minwedge.all_hold() && minwedge_report.passed() && fit.passed() && spike.all_hold() &&
           spike_union.passed() && delta > 0;
  }
};

struct SweepSide {
  int sign = 1;
  std::vector<Scalar> axis;  // input ambient axis of this side
  NormalCone cone;
  Scalar gamma, alpha_hat, radius;
  std::vector<SweepSlice> slices;
  Scalar delta;
};

struct AmbientWedgeSample {
  std::vector<Scalar> axis;  // rational null axis in input coordinates
  std::vector<SweepSide> sides;
  Scalar delta;
  Scalar radius;             // smallest admissible t-radius over the sides
  Scalar round_aperture;     // min(radius, delta): round cone about +-y1 in normal coordinates
  double kappa = 0;
  std::string hull_claim;
  bool passed() const {
    if (!(delta > 0)) return false;
    for (const auto& s : sides)
      for (const auto& sl : s.slices)
        if (!sl.passed()) return false;
    return true;
  }
};

namespace detail {

/// Exact projection of a float ambient direction onto N = span{J e_k, k < n}
/// after rationalizing the coefficients.
inline std::vector<Scalar> rational_null_axis(const NormalFormData& nf, const std::vector<double>& w) {
  Coords c(nf.n);
  const auto n = static_cast<std::size_t>(nf.n);
  std::vector<std::vector<Scalar>> je;
  for (std::size_t k = 0; k < n; ++k) je.push_back(c.J(nf.frame.basis[k]));
  std::vector<Scalar> wr;
  for (double x : w) wr.push_back(rationalize(x, 1e-15, std::int64_t(1) << 40));
  QMatrix G(n, n);
  std::vector<Scalar> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = dot(je[i], wr);
    for (std::size_t j = 0; j < n; ++j) G(i, j) = dot(je[i], je[j]);
  }
  const auto coeff = *solve_exact(G, rhs);
  std::vector<Scalar> out(c.dim(), Scalar(0));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < c.dim(); ++i) out[i] += coeff[k] * je[k][i];
  return out;
}

/// max |Q(t)| over |t| <= rho: exact for n = 2 (quadratic in one variable),
/// grid plus axis points otherwise.
inline Scalar max_abs_Q(const QMatrix& L, int n, const Scalar& rho, int grid) {
  auto Q = [&](const std::vector<Scalar>& t) -> Scalar {
    std::vector<Scalar> one_t{Scalar(1)};
    one_t.insert(one_t.end(), t.begin(), t.end());
    Scalar q = 0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) q += one_t[j] * L(j, k) * one_t[k];
    return abs(q);
  };
  if (n == 2) {
    Scalar m = std::max(Q({rho}), Q({-rho}));
    if (L(1, 1) != 0) {
      const Scalar v = -L(0, 1) / L(1, 1);
      if (abs(v) <= rho) m = std::max(m, Q({v}));
    }
    return m;
  }
  Scalar m = Q(std::vector<Scalar>(static_cast<std::size_t>(n - 1), Scalar(0)));
  std::vector<int> idx(static_cast<std::size_t>(n - 1), 0);
  for (;;) {
    std::vector<Scalar> t;
    Scalar t2 = 0;
    for (int i : idx) {
      t.push_back(rho * ratio(2 * i - (grid - 1), grid - 1));
      t2 += t.back() * t.back();
    }
    if (t2 <= rho * rho) m = std::max(m, Q(t));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == grid) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  for (int k = 0; k < n - 1; ++k)
    for (int sgn : {-1, 1}) {
      std::vector<Scalar> t(static_cast<std::size_t>(n - 1), Scalar(0));
      t[static_cast<std::size_t>(k)] = rho * sgn;
      m = std::max(m, Q(t));
    }
  return m;
}

inline std::vector<std::vector<Scalar>> t_grid(int n, const Scalar& radius, int points) {
  std::vector<std::vector<Scalar>> out;
  std::vector<int> idx(static_cast<std::size_t>(n - 1), 0);
  const int p = std::max(points, 1);
  for (;;) {
    std::vector<Scalar> t;
    Scalar t2 = 0;
    for (int i : idx) {
      t.push_back(p == 1 ? Scalar(0) : radius * ratio(2 * i - (p - 1), p - 1));
      t2 += t.back() * t.back();
    }
    if (t2 <= radius * radius) out.push_back(std::move(t));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == p) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return out;
}

}  // namespace detail

/// Runs the slice machinery on a grid of slice parameters for both sides of a
/// two-sided wedge and assembles the smallest certified target size.
inline AmbientWedgeSample ambient_wedge_sweep(const HypersurfaceModel& M, const WedgeSpec& W,
                                              const SweepConfig& cfg = {}) {
  const Classification cls = classify_wedge(M, W);
  if (cls.verdict != Verdict::two_sided || !cls.witness)
    throw PreconditionError("wedge sweep needs a two-sided verdict with a null axis; classification gave " +
                            to_string(cls.verdict));
  const NormalFormData base = normal_form(M);
  AmbientWedgeSample out;
  Coords c(M.n);
  if (cls.q_axis_exact == 0) {
    out.axis = W.axis_at_origin();
    if (W.axis.size() != c.dim()) {
      out.axis.assign(c.dim(), Scalar(0));
      for (int k = 0; k < M.n; ++k) out.axis[c.y(k)] = eval_poly(W.axis[static_cast<std::size_t>(k)], M.base);
    } else {
      for (std::size_t i = 0; i < c.dim(); ++i) out.axis[i] = eval_poly(W.axis[i], M.base);
    }
  } else {
    out.axis = detail::rational_null_axis(base, *cls.witness);
  }
  const ShrunkWedge shrunk = shrink_wedge(W);
  out.kappa = shrunk.kappa;
  out.hull_claim =
      "the cones Psi_t(T_delta) sweep a two-sided ambient cone; that its hull contains a neighborhood of a point "
      "is the cited hull theorem for two-sided wedges, not re-proved here";

  bool first = true;
  int side_index = 0;
  if (cfg.signs.empty()) throw PreconditionError("sweep needs at least one side");
  for (int sign : cfg.signs) {
    if (sign != 1 && sign != -1) throw PreconditionError("sweep sides are +1 and -1");
    SweepSide side;
    side.sign = sign;
    side.axis = out.axis;
    for (auto& x : side.axis) x *= sign;
    FrameOptions fo;
    fo.axis = side.axis;
    const NormalFormData nf = normal_form(M, fo);
    side.cone = normal_cone(nf, side.axis, shrunk.wedge.aperture, shrunk.wedge.extent, Sides::plus);
    side.gamma = side.cone.aperture / 4;
    side.alpha_hat = cfg.alpha / 4;

    const Scalar top = std::min<Scalar>(1, side.gamma);
    auto ok = [&](const Scalar& rho) { return detail::max_abs_Q(nf.Lambda, M.n, rho, 9) <= side.alpha_hat; };
    if (!ok(0)) throw PreconditionError("empty admissible t-grid: |Q(0)| exceeds alpha^");
    if (ok(top)) {
      side.radius = top;
    } else {
      Scalar lo = 0, hi = top;
      for (int it = 0; it < 40; ++it) {
        const Scalar mid = (lo + hi) / 2;
        (ok(mid) ? lo : hi) = mid;
      }
      side.radius = lo;
    }
    if (side.radius <= 0) throw PreconditionError("empty admissible t-grid: no positive radius with |Q(t)| <= alpha^");

    int ti = 0;
    const auto ts = cfg.t_list.empty() ? detail::t_grid(M.n, side.radius, cfg.t_points) : cfg.t_list;
    for (const auto& t : ts) {
      for (const auto& tk : t)
        if (abs(tk) > side.radius)
          throw PreconditionError("slice t = " + to_string(tk) + " lies outside the admissible radius " +
                                  to_string(side.radius));
      const std::uint64_t seed = cfg.seed + 1000003ULL * static_cast<std::uint64_t>(side_index) + 7919ULL * ti++;
      SliceBox box = cfg.box;
      box.seed = seed;
      const SliceModel s = build_slice(nf, t, box);
      SweepSlice rec;
      rec.t = t;
      rec.Q = s.Q;
      rec.A = s.A;
      rec.B = s.B;
      rec.A_tilde = s.A_tilde;
      rec.A_prime = s.A_prime;
      rec.minwedge = minwedge_constants(side.cone.aperture, s.A, s.B, s.A_tilde, slice_root_eps_cap(s));
      rec.minwedge_report = minwedge_check(s, nf, side.cone, rec.minwedge, cfg.minwedge_samples, seed + 1);
      SpikeFitOptions so;
      so.alpha = cfg.alpha;
      so.samples = cfg.spike_samples;
      so.remainder_samples = cfg.spike_samples;
      so.seed = seed + 2;
      rec.fit = spike_fit(s, rec.minwedge, so);
      rec.spike = spike_constants(rec.fit.growth, rec.fit.beta, rec.fit.ell, rec.fit.r);
      rec.spike_union = spike_union_check(rec.spike.eps, rec.spike.K, rec.fit.family, rec.fit.growth, rec.fit.beta,
                                          rec.fit.ell, rec.fit.r, cfg.union_samples, seed + 3);
      rec.delta = rec.spike.delta;
      if (side.slices.empty() || rec.delta < side.delta) side.delta = rec.delta;
      side.slices.push_back(std::move(rec));
    }
    if (first || side.delta < out.delta) out.delta = side.delta;
    if (first || side.radius < out.radius) out.radius = side.radius;
    first = false;
    out.sides.push_back(std::move(side));
    ++side_index;
  }
  out.round_aperture = std::min(out.radius, out.delta);
  return out;
}

}  // namespace eow

#endif  // EOW_DISCS_SLICE_HPP
