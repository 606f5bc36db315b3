#ifndef EOW_DISCS_LEWY_HPP
#define EOW_DISCS_LEWY_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eow/discs/slice.hpp"
#include "eow/screens/folding.hpp"

namespace eow {

/// Coordinates with w^ = w + (i/2) z^t Lambda z, in which
/// M = {v^ = (1/2)(x^t Lambda x + y^t Lambda y) + x^t Omega y + phi^} and
/// E = {y^ = f^, v^ = (1/2) x^t Lambda x + g^}.
struct HatChange {
  PolyMap to_normal;    // hat -> normal coordinates
  PolyMap from_normal;  // normal -> hat coordinates
  TruncatedPoly r;      // defining function in hat coordinates
  TruncatedPoly h;      // graph v^ = h^(x, y, u)
  TruncatedPoly phi;    // h^ minus its quadratic part, order >= 3
  EdgeModel edge;
  TruncatedPoly g_rest;  // edge v-graph minus (1/2) x^t Lambda x, order >= 4
  QMatrix Lambda, Omega;
};

inline HatChange hat_change(const NormalFormData& nf) {
  Coords c(nf.n);
  const int cap = nf.cap;
  const Vars amb = c.ambient();
  const auto zc = detail::complex_coordinates(c, cap);
  ComplexPoly quad(amb, cap);
  for (int a = 0; a < nf.n; ++a)
    for (int b = 0; b < nf.n; ++b)
      quad += zc[static_cast<std::size_t>(a)] * zc[static_cast<std::size_t>(b)] * nf.Lambda(a, b);
  const ComplexPoly dw = (quad * Scalar(1, 2)).times_i();
  const std::vector<ComplexPoly> no_dz(static_cast<std::size_t>(nf.n), ComplexPoly(amb, cap));

  HatChange out;
  out.Lambda = nf.Lambda;
  out.Omega = nf.Omega;
  out.from_normal = detail::holomorphic_shift(c, no_dz, dw, cap);
  out.to_normal = detail::holomorphic_shift(c, no_dz, ComplexPoly(amb, cap) - dw, cap);
  out.r = compose_truncated(nf.r, out.to_normal, cap);
  out.h = graph_solve(out.r, "v", cap);
  out.edge = detail::regraph(compose_maps(out.from_normal, nf.edge.embedding(), cap), nf.n, cap);

  const Vars gv = c.graph();
  TruncatedPoly expect(gv, cap);
  TruncatedPoly half_xlx(c.edge(), cap);
  for (int j = 0; j < nf.n; ++j)
    for (int k = 0; k < nf.n; ++k) {
      auto xj = TruncatedPoly::variable(gv, cap, gv[c.x(j)]), xk = TruncatedPoly::variable(gv, cap, gv[c.x(k)]);
      auto yj = TruncatedPoly::variable(gv, cap, gv[c.y(j)]), yk = TruncatedPoly::variable(gv, cap, gv[c.y(k)]);
      expect += (xj * xk + yj * yk) * (nf.Lambda(j, k) / 2) + xj * yk * nf.Omega(j, k);
      auto ej = TruncatedPoly::variable(c.edge(), cap, c.edge()[static_cast<std::size_t>(j)]);
      auto ek = TruncatedPoly::variable(c.edge(), cap, c.edge()[static_cast<std::size_t>(k)]);
      half_xlx += ej * ek * (nf.Lambda(j, k) / 2);
    }
  if (out.h.degree_range(0, 2) != expect)
    throw NumericalError("hat graph has quadratic part " + out.h.degree_range(0, 2).str() + ", expected " + expect.str());
  out.phi = out.h.degree_range(3, cap);
  for (const auto& f : out.edge.f)
    if (f.order() < 4) throw NumericalError("hat edge y-graph has order below four: " + f.str());
  out.g_rest = out.edge.g - half_xlx;
  if (out.g_rest.order() < 4) throw NumericalError("hat edge v-graph differs from (1/2) x^t Lambda x below order four");
  return out;
}

/// Float evaluation of a polynomial map.
class CompiledMap {
 public:
  CompiledMap() = default;
  explicit CompiledMap(const PolyMap& m) {
    for (const auto& c : m.components) comps_.emplace_back(c);
  }
  std::vector<double> operator()(const std::vector<double>& p) const {
    std::vector<double> out;
    out.reserve(comps_.size());
    for (const auto& c : comps_) out.push_back(c(p));
    return out;
  }

 private:
  std::vector<CompiledPoly> comps_;
};

/// Hat coordinates -> input coordinates through the truncated chain.
class InputChart {
 public:
  InputChart(const NormalFormData& nf, const HatChange& hat)
      : to_normal_(hat.to_normal), chain_(nf.chain) {
    for (const auto& x : nf.translation) translation_.push_back(to_double(x));
  }
  std::vector<double> operator()(const std::vector<double>& hat_point) const {
    auto p = chain_(to_normal_(hat_point));
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += translation_[i];
    return p;
  }
  const std::vector<double>& base() const { return translation_; }

 private:
  CompiledMap to_normal_, chain_;
  std::vector<double> translation_;
};

struct LewyOptions {
  int angles = 720;
  int march_steps = 400;
  double reach = 2.0;  // rays are marched out to reach * delta
  double edge_tolerance = 1e-12;
  double graph_tolerance = 1e-9;
  int interior_rings = 8;
  int interior_stride = 8;  // every k-th angle carries interior samples
  bool label_boundary = true;
  bool audit = true;
  int audit_polynomials = 20;
  int audit_degree = 4;
  double audit_tolerance = 1e-6;
  double max_delta = 0.25;
  std::uint64_t seed = 0;
};

struct DiscBoundarySample {
  double angle = 0, radius = 0;
  cplx zeta;
  std::vector<double> point;  // hat coordinates
  Side side = Side::none;
  double margin = 0;
  double edge_distance = 0;
};

struct LewyDisc {
  std::vector<double> sigma;  // scaled so sigma^t Lambda sigma = 2
  double delta = 0;
  bool modified = false;
  std::vector<cplx> A, B;     // zeta -> zeta A + B in (z^, w^)
  std::vector<DiscBoundarySample> boundary;
  int edge_crossings = 0;
  int plus = 0, minus = 0;
  int interior_samples = 0;
  double max_interior_r = -std::numeric_limits<double>::infinity();
  double min_radius = 0, max_radius = 0;
  std::vector<double> center;  // hat coordinates of the image of 0
  std::optional<ModulusAudit> audit;

  std::vector<cplx> embed(cplx zeta) const {
    std::vector<cplx> z(A.size());
    for (std::size_t k = 0; k < A.size(); ++k) z[k] = zeta * A[k] + B[k];
    return z;
  }
  std::vector<double> real_point(cplx zeta) const {
    const auto z = embed(zeta);
    const std::size_t n = z.size() - 1;
    std::vector<double> p(2 * n + 2);
    for (std::size_t k = 0; k < n; ++k) {
      p[k] = z[k].real();
      p[n + k] = z[k].imag();
    }
    p[2 * n] = z[n].real();
    p[2 * n + 1] = z[n].imag();
    return p;
  }
};

namespace detail {

inline double sigma_form(const QMatrix& L, const std::vector<double>& s) {
  double q = 0;
  for (std::size_t j = 0; j < s.size(); ++j)
    for (std::size_t k = 0; k < s.size(); ++k) q += s[j] * to_double(L(j, k)) * s[k];
  return q;
}

/// Affine data of the disc: (zeta sigma, i delta^2), or the map through the
/// two edge points over zeta = +-delta.
inline void disc_affine(const HatChange& hat, const std::vector<double>& sigma, double delta, bool modified,
                        std::vector<cplx>& A, std::vector<cplx>& B) {
  const std::size_t n = sigma.size();
  A.assign(n + 1, 0.0);
  B.assign(n + 1, 0.0);
  if (!modified) {
    for (std::size_t k = 0; k < n; ++k) A[k] = sigma[k];
    B[n] = cplx(0, delta * delta);
    return;
  }
  std::vector<CompiledPoly> f;
  for (const auto& p : hat.edge.f) f.emplace_back(p);
  const CompiledPoly g(hat.edge.g);
  auto edge_point = [&](double s) {
    std::vector<double> a(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) a[k] = s * delta * sigma[k];
    std::vector<cplx> P(n + 1);
    for (std::size_t k = 0; k < n; ++k) P[k] = cplx(a[k], f[k](a));
    P[n] = cplx(0, g(a));
    return P;
  };
  const auto Pp = edge_point(1), Pm = edge_point(-1);
  for (std::size_t k = 0; k <= n; ++k) {
    A[k] = (Pp[k] - Pm[k]) / (2 * delta);
    B[k] = (Pp[k] + Pm[k]) / 2.0;
  }
}

}  // namespace detail

/// Boundary radius of the component of {r^ < 0} containing 0 along the ray at
/// angle theta; marching continues to reach * delta to detect re-entry.
class DiscDomain {
 public:
  DiscDomain(const LewyDisc& d, CompiledPoly h, const LewyOptions& opt) : d_(d), h_(std::move(h)), opt_(opt) {}

  double r_hat(cplx zeta) const {
    auto p = d_.real_point(zeta);
    const double v = p.back();
    p.pop_back();
    return -v + h_(p);
  }

  double radius(double theta) const {
    const cplx dir = std::polar(1.0, theta);
    const double step = opt_.reach * d_.delta / opt_.march_steps;
    double lo = 0, hi = -1;
    int k = 1;
    for (; k <= opt_.march_steps; ++k) {
      if (r_hat(dir * (k * step)) >= 0) {
        lo = (k - 1) * step;
        hi = k * step;
        break;
      }
    }
    if (hi < 0) {
      std::ostringstream os;
      os << "disc domain does not close within " << opt_.reach << " delta along angle " << theta;
      throw NumericalError(os.str());
    }
    for (int it = 0; it < 200 && hi - lo > 0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (r_hat(dir * mid) < 0 ? lo : hi) = mid;
    }
    for (int j = k + 1; j <= opt_.march_steps; ++j)
      if (r_hat(dir * (j * step)) < 0) {
        std::ostringstream os;
        os << "disc domain is not star-shaped: the ray at angle " << theta << " re-enters at radius " << j * step;
        throw NumericalError(os.str());
      }
    return 0.5 * (lo + hi);
  }

 private:
  const LewyDisc& d_;
  CompiledPoly h_;
  LewyOptions opt_;
};

/// Lewy disc through sigma at height delta^2 in hat coordinates; boundary
/// samples are labeled against the hat-coordinate wedge.
inline LewyDisc lewy_disc(const HatChange& hat, const WedgeSpec& wedge_hat, const std::vector<double>& sigma,
                          double delta, bool modified, const LewyOptions& opt = {}) {
  const std::size_t n = hat.edge.f.size();
  if (sigma.size() != n) throw PreconditionError("sigma needs n components");
  if (!(delta > 0) || delta > opt.max_delta) {
    std::ostringstream os;
    os << "disc height delta = " << delta << " outside (0, " << opt.max_delta << "]";
    throw PreconditionError(os.str());
  }
  const double q = detail::sigma_form(hat.Lambda, sigma);
  if (!(q > 0)) {
    std::ostringstream os;
    os << "sigma^t Lambda sigma = " << q << " is not positive; discs fill the other side (replace r by -r)";
    throw PreconditionError(os.str());
  }
  LewyDisc d;
  d.delta = delta;
  d.modified = modified;
  const double scale = std::sqrt(2.0 / q);
  for (double s : sigma) d.sigma.push_back(s * scale);
  detail::disc_affine(hat, d.sigma, delta, modified, d.A, d.B);
  d.center = d.real_point(0.0);

  const CompiledPoly h(hat.h);
  const DiscDomain dom(d, h, opt);
  if (dom.r_hat(0.0) >= 0) throw CertificateError("disc center is not on the side r^ < 0");

  std::vector<double> radii(static_cast<std::size_t>(opt.angles));
  for (int k = 0; k < opt.angles; ++k) radii[static_cast<std::size_t>(k)] = dom.radius(2 * M_PI * k / opt.angles);
  d.min_radius = *std::min_element(radii.begin(), radii.end());
  d.max_radius = *std::max_element(radii.begin(), radii.end());

  if (opt.label_boundary) {
    const CompiledWedge W(wedge_hat);
    WedgeSideOptions wo;
    wo.edge_tolerance = opt.edge_tolerance;
    wo.graph_tolerance = opt.graph_tolerance;
    for (int k = 0; k < opt.angles; ++k) {
      DiscBoundarySample b;
      b.angle = 2 * M_PI * k / opt.angles;
      b.radius = radii[static_cast<std::size_t>(k)];
      b.zeta = std::polar(b.radius, b.angle);
      b.point = d.real_point(b.zeta);
      const auto res = wedge_side(W, h, b.point, wo);
      b.side = res.side;
      b.margin = res.margin;
      b.edge_distance = res.projection.distance;
      if (b.side == Side::none) {
        std::ostringstream os;
        os.precision(17);
        os << "disc boundary leaves W u E at sample " << k << " (zeta = " << b.zeta.real() << " + " << b.zeta.imag()
           << "i, distance to E " << b.edge_distance << ")";
        throw CertificateError(os.str());
      }
      if (b.side == Side::plus) ++d.plus;
      if (b.side == Side::minus) ++d.minus;
      d.boundary.push_back(std::move(b));
    }
    const int m = static_cast<int>(d.boundary.size());
    for (int k = 0; k < m; ++k)
      if (d.boundary[static_cast<std::size_t>(k)].side == Side::edge &&
          d.boundary[static_cast<std::size_t>((k + m - 1) % m)].side != Side::edge)
        ++d.edge_crossings;
    if (d.edge_crossings != 2)
      throw CertificateError("disc boundary meets the edge in " + std::to_string(d.edge_crossings) +
                             " places instead of two");
  }

  std::vector<std::vector<cplx>> interior;
  for (int k = 0; k < opt.angles; k += opt.interior_stride) {
    const double th = 2 * M_PI * k / opt.angles;
    for (int j = 0; j < opt.interior_rings; ++j) {
      const cplx z = std::polar(radii[static_cast<std::size_t>(k)] * j / opt.interior_rings, th);
      const double r = dom.r_hat(z);
      d.max_interior_r = std::max(d.max_interior_r, r);
      ++d.interior_samples;
      interior.push_back(d.embed(z));
      if (!(r < 0)) {
        std::ostringstream os;
        os << "interior disc sample at zeta = " << z.real() << " + " << z.imag() << "i has r^ = " << r << " >= 0";
        throw CertificateError(os.str());
      }
    }
  }

  if (opt.audit) {
    std::mt19937_64 rng(opt.seed);
    std::vector<HolomorphicPoly> polys;
    for (int k = 0; k < opt.audit_polynomials; ++k) polys.push_back(HolomorphicPoly::random(rng, opt.audit_degree, n + 1));
    auto boundary = [&](double s) {
      const double th = 2 * M_PI * s;
      return d.embed(std::polar(dom.radius(th), th));
    };
    std::ostringstream what;
    what << "the Lewy disc delta = " << delta;
    d.audit = curve_modulus_audit(boundary, interior, polys, opt.angles, opt.audit_tolerance, 8, what.str());
  }
  return d;
}

/// Wedge in hat coordinates over the hat edge with the normal-cone axis and
/// aperture of the input wedge.
inline WedgeSpec hat_wedge(const NormalFormData& nf, const HatChange& hat, const std::vector<Scalar>& sigma_input,
                           double aperture, double extent, Sides sides = Sides::two) {
  WedgeSpec w = normal_cone(nf, sigma_input, aperture, extent, sides).wedge;
  w.edge = hat.edge;
  return w;
}

struct CenterCurve {
  std::vector<double> deltas;
  std::vector<std::vector<double>> centers;  // input coordinates minus the base point
  std::vector<double> a, b;                  // least-squares c(delta) = a delta^2 + b delta^3
  std::vector<double> tau;                   // image of d/dv under the frame
  double angle = 0;                          // between a and tau
};

/// Centers of the discs as delta varies, in input coordinates, with the
/// angle between their quadratic coefficient and the transverse direction.
inline CenterCurve center_curve(const NormalFormData& nf, const HatChange& hat, const std::vector<double>& sigma,
                                const std::vector<double>& deltas, bool modified) {
  if (deltas.size() < 2) throw PreconditionError("center curve needs at least two heights");
  Coords c(nf.n);
  const InputChart chart(nf, hat);
  CenterCurve out;
  out.deltas = deltas;
  const double q = detail::sigma_form(hat.Lambda, sigma);
  if (!(q > 0)) throw PreconditionError("sigma^t Lambda sigma is not positive");
  std::vector<double> s;
  for (double x : sigma) s.push_back(x * std::sqrt(2.0 / q));
  for (double dl : deltas) {
    LewyDisc d;
    d.delta = dl;
    detail::disc_affine(hat, s, dl, modified, d.A, d.B);
    auto p = chart(d.real_point(0.0));
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= chart.base()[i];
    out.centers.push_back(std::move(p));
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(deltas.size()), 2);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    X(static_cast<Eigen::Index>(i), 0) = deltas[i] * deltas[i];
    X(static_cast<Eigen::Index>(i), 1) = deltas[i] * deltas[i] * deltas[i];
  }
  const auto qr = X.colPivHouseholderQr();
  for (std::size_t j = 0; j < c.dim(); ++j) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(deltas.size()));
    for (std::size_t i = 0; i < deltas.size(); ++i) y(static_cast<Eigen::Index>(i)) = out.centers[i][j];
    const Eigen::VectorXd sol = qr.solve(y);
    out.a.push_back(sol(0));
    out.b.push_back(sol(1));
  }
  for (std::size_t i = 0; i < c.dim(); ++i) out.tau.push_back(to_double(nf.frame.R(i, c.v())));
  const double cosang = dot(out.a, out.tau) / (norm2(out.a) * norm2(out.tau));
  out.angle = std::acos(std::clamp(cosang, -1.0, 1.0));
  return out;
}

struct OneSidedConfig {
  std::vector<double> deltas{0.005, 0.01, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04, 0.045, 0.05};
  double tau_tilt = 1.0;  // tilts of tau0 by s * (unit N direction), |s_k| <= tau_tilt
  int tau_grid = 9;       // tilt values per N direction
  int line_levels = 10;  // imaginary-axis samples at +-2^-k of the boundary radius, k < line_levels
  double resolution = 4e-4;
  std::vector<double> apertures{0.5, 0.25, 0.125, 0.0625, 0.03125};
  int cone_directions = 32;
  int cone_radii = 4;
  double test_tilt = 0.5;  // test taus: tau0 and tau0 +- test_tilt * unit N direction
  std::vector<std::vector<Scalar>> base_offsets;  // edge-parameter offsets of sampled base points; empty = p0 only
  LewyOptions lewy;
  std::uint64_t seed = 0;
};

struct ConeInclusion {
  std::vector<double> base;  // input base point
  std::vector<double> tau;   // unit axis in input coordinates
  double dr_tau = 0;         // dr(tau) for the unit axis
  double aperture = 0;       // largest searched aperture whose samples lie in U (0 if none)
  double extent = 0;
  double worst_distance = 0;  // largest nearest-neighbour distance at that aperture
  int samples = 0;
};

struct OneSidedReport {
  std::string side;  // r<0 or r>0
  std::vector<double> sigma_input;  // unit, input coordinates
  std::vector<double> sigma_normal;  // normal y-coordinates
  std::vector<std::vector<double>> cloud;  // sampled points of U, input coordinates
  std::vector<int> cloud_tag;              // index of the tau of each point
  std::vector<std::vector<double>> taus;   // sampled taus, input coordinates
  std::vector<ConeInclusion> cones;        // property (1)
  double resolution = 0;
  // Property (2) at p0 with tau0.
  std::vector<LewyDisc> discs;
  int plus = 0, minus = 0, edge = 0;
  double subwedge_aperture = 0;  // largest perp/along ratio of labeled boundary samples
  double wedge_aperture = 0;
  CenterCurve center;
  bool property1() const {
    return !cones.empty() && std::all_of(cones.begin(), cones.end(), [](const ConeInclusion& c) { return c.aperture > 0; });
  }
  bool property2() const { return plus > 0 && minus > 0 && subwedge_aperture < wedge_aperture; }
  bool passed() const { return property1() && property2() && center.angle <= 1e-3; }
};

namespace detail {

inline std::vector<Scalar> unit_rational(const std::vector<double>& v) {
  const double n = norm2(v);
  std::vector<Scalar> out;
  for (double x : v) out.push_back(rationalize(x / n, 1e-15, std::int64_t(1) << 40));
  return out;
}

}  // namespace detail

/// Samples the one-sided set U filled by Lewy discs and checks the cone and
/// two-sided subwedge properties.
inline OneSidedReport one_sided_set(const HypersurfaceModel& M0, const WedgeSpec& W, const OneSidedConfig& cfg = {}) {
  const Classification cls = classify_wedge(M0, W);
  if (cls.verdict != Verdict::one_sided || !cls.witness)
    throw PreconditionError("one-sided set needs a one-sided verdict; classification gave " + to_string(cls.verdict));
  HypersurfaceModel M = M0;
  OneSidedReport rep;
  rep.side = to_string(*cls.side);
  rep.resolution = cfg.resolution;
  if (*cls.side == ExtensionSide::r_positive) M.r = -M.r;
  Coords c(M.n);
  const auto n = static_cast<std::size_t>(M.n);

  const NormalFormData base_nf = normal_form(M);
  const std::vector<Scalar> sigma_in = detail::rational_null_axis(base_nf, *cls.witness);
  for (const auto& x : sigma_in) rep.sigma_input.push_back(to_double(x));
  rep.sigma_input = normalized(rep.sigma_input);

  // tau0 = image of d/dv in the default frame (dr(tau0) < 0) and unit N directions.
  std::vector<double> tau0;
  for (std::size_t i = 0; i < c.dim(); ++i) tau0.push_back(to_double(base_nf.frame.R(i, c.v())));
  std::vector<std::vector<double>> ndirs;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> je;
    for (const auto& x : c.J(base_nf.frame.basis[k])) je.push_back(to_double(x));
    for (const auto& prev : ndirs) {
      const double f = dot(je, prev);
      for (std::size_t i = 0; i < je.size(); ++i) je[i] -= f * prev[i];
    }
    ndirs.push_back(normalized(je));
  }
  const double t0n = norm2(tau0);
  for (auto& x : tau0) x /= t0n;

  auto tilted = [&](const std::vector<double>& s) {
    std::vector<double> t = tau0;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < t.size(); ++i) t[i] += s[k] * ndirs[k][i];
    return t;
  };

  // Rational tau in J(T_pE): tau0 + tilt, projected exactly.
  auto frame_for = [&](const HypersurfaceModel& Mp, const NormalFormData& nf0, const std::vector<double>& tau) {
    FrameOptions fo;
    std::vector<Scalar> tq = detail::unit_rational(tau);
    std::vector<std::vector<Scalar>> je;
    for (std::size_t k = 0; k <= n; ++k) je.push_back(c.J(nf0.frame.basis[k]));
    QMatrix G(n + 1, n + 1);
    std::vector<Scalar> rhs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      rhs[i] = dot(je[i], tq);
      for (std::size_t j = 0; j <= n; ++j) G(i, j) = dot(je[i], je[j]);
    }
    const auto coeff = *solve_exact(G, rhs);
    std::vector<Scalar> t(c.dim(), Scalar(0));
    for (std::size_t k = 0; k <= n; ++k)
      for (std::size_t i = 0; i < c.dim(); ++i) t[i] += coeff[k] * je[k][i];
    fo.tau = t;
    return normal_form(Mp, fo);
  };

  auto sigma_normal = [&](const NormalFormData& nf) {
    const QMatrix Ri = *inverse(nf.frame.R);
    std::vector<double> s;
    for (std::size_t k = 0; k < n; ++k) {
      Scalar acc = 0;
      for (std::size_t j = 0; j < c.dim(); ++j) acc += Ri(n + k, j) * sigma_in[j];
      s.push_back(to_double(acc));
    }
    return s;
  };

  // Tilt grid.
  std::vector<std::vector<double>> tilts;
  {
    std::vector<int> idx(n, 0);
    const int g = std::max(cfg.tau_grid, 1);
    for (;;) {
      std::vector<double> s;
      for (int i : idx) s.push_back(g == 1 ? 0.0 : cfg.tau_tilt * (2.0 * i - (g - 1)) / (g - 1));
      tilts.push_back(s);
      std::size_t k = 0;
      while (k < n && ++idx[k] == g) idx[k++] = 0;
      if (k == n) break;
    }
  }

  std::vector<std::vector<Scalar>> offsets = cfg.base_offsets;
  if (offsets.empty()) offsets.push_back(std::vector<Scalar>(n + 1, Scalar(0)));
  LewyOptions light = cfg.lewy;
  light.label_boundary = false;
  light.audit = false;

  for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
    HypersurfaceModel Mp = M;
    for (std::size_t k = 0; k <= n; ++k) Mp.base[k] = M.base[k] + offsets[oi][k];
    const std::size_t first = rep.cloud.size();
    std::vector<double> pbase;
    for (const auto& x : Mp.base_point()) pbase.push_back(to_double(x));

    const NormalFormData nfp = normal_form(Mp);
    for (const auto& s : tilts) {
      const NormalFormData nf = frame_for(Mp, nfp, tilted(s));
      const HatChange hat = hat_change(nf);
      const InputChart chart(nf, hat);
      const auto sig = sigma_normal(nf);
      const int tag = static_cast<int>(rep.taus.size());
      std::vector<double> tin;
      for (std::size_t i = 0; i < c.dim(); ++i) tin.push_back(to_double(nf.frame.R(i, c.v())));
      rep.taus.push_back(tin);
      for (double dl : cfg.deltas) {
        LewyDisc d;
        d.delta = dl;
        const double q = detail::sigma_form(hat.Lambda, sig);
        if (!(q > 0)) throw PreconditionError("sigma^t Lambda sigma is not positive in a tilted frame");
        for (double x : sig) d.sigma.push_back(x * std::sqrt(2.0 / q));
        detail::disc_affine(hat, d.sigma, dl, true, d.A, d.B);
        const CompiledPoly h(hat.h);
        const DiscDomain dom(d, h, light);
        const double up = dom.radius(M_PI / 2), down = dom.radius(-M_PI / 2);
        for (int j = 0; j < cfg.line_levels; ++j)
          for (const double eta : {up * std::ldexp(0.999, -j), -down * std::ldexp(0.999, -j)}) {
            rep.cloud.push_back(chart(d.real_point(cplx(0, eta))));
            rep.cloud_tag.push_back(tag);
          }
        rep.cloud.push_back(chart(d.real_point(0.0)));
        rep.cloud_tag.push_back(tag);
      }
    }

    // Property (1): cones about test taus.
    std::vector<std::vector<double>> tests{std::vector<double>(n, 0.0)};
    for (std::size_t k = 0; k < n; ++k)
      for (double sg : {-1.0, 1.0}) {
        std::vector<double> s(n, 0.0);
        s[k] = sg * cfg.test_tilt;
        tests.push_back(s);
      }
    const double dmax = *std::max_element(cfg.deltas.begin(), cfg.deltas.end());
    const auto grad = Mp.gradient_at_base();
    std::mt19937_64 rng(cfg.seed + oi);
    std::normal_distribution<double> gauss;
    for (const auto& s : tests) {
      ConeInclusion ci;
      ci.base = pbase;
      ci.tau = normalized(tilted(s));
      for (std::size_t i = 0; i < c.dim(); ++i) ci.dr_tau += to_double(grad[i]) * ci.tau[i];
      ci.extent = 0.5 * dmax * dmax;
      // Orthonormal complement of tau in J(T_pE) = span(N, tau0).
      std::vector<std::vector<double>> comp;
      std::vector<std::vector<double>> span = ndirs;
      span.push_back(tau0);
      for (auto v : span) {
        double f = dot(v, ci.tau);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= f * ci.tau[i];
        for (const auto& prev : comp) {
          f = dot(v, prev);
          for (std::size_t i = 0; i < v.size(); ++i) v[i] -= f * prev[i];
        }
        if (norm2(v) > 1e-9) comp.push_back(normalized(v));
      }
      std::vector<std::vector<double>> dirs;
      for (int k = 0; k < cfg.cone_directions; ++k) {
        std::vector<double> w(comp.size());
        if (comp.size() == 2) {
          const double a = 2 * M_PI * k / cfg.cone_directions;
          w = {std::cos(a), std::sin(a)};
        } else {
          for (auto& x : w) x = gauss(rng);
        }
        const double wn = norm2(w);
        std::vector<double> dvec(c.dim(), 0.0);
        for (std::size_t j = 0; j < comp.size(); ++j)
          for (std::size_t i = 0; i < c.dim(); ++i) dvec[i] += w[j] / wn * comp[j][i];
        dirs.push_back(dvec);
      }
      for (double ap : cfg.apertures) {
        double worst = 0;
        int count = 0;
        for (int rr = 1; rr <= cfg.cone_radii; ++rr) {
          const double len = ci.extent * rr / cfg.cone_radii;
          for (const double frac : {0.0, 0.5, 1.0}) {
            for (const auto& dv : dirs) {
              std::vector<double> x(c.dim());
              const double norm = std::sqrt(1 + frac * ap * frac * ap);
              for (std::size_t i = 0; i < c.dim(); ++i) x[i] = pbase[i] + len * (ci.tau[i] + frac * ap * dv[i]) / norm;
              double best = std::numeric_limits<double>::infinity();
              for (std::size_t j = first; j < rep.cloud.size(); ++j) {
                double d2 = 0;
                for (std::size_t i = 0; i < c.dim(); ++i) d2 += (rep.cloud[j][i] - x[i]) * (rep.cloud[j][i] - x[i]);
                best = std::min(best, d2);
              }
              worst = std::max(worst, std::sqrt(best));
              ++count;
              if (frac == 0.0) break;
            }
          }
        }
        if (worst <= cfg.resolution) {
          ci.aperture = ap;
          ci.worst_distance = worst;
          ci.samples = count;
          break;
        }
        ci.worst_distance = worst;
        ci.samples = count;
      }
      rep.cones.push_back(ci);
    }
  }

  // Property (2) and the center curve at p0 with tau0.
  const NormalFormData nf = frame_for(M, base_nf, tau0);
  const HatChange hat = hat_change(nf);
  const auto sig = sigma_normal(nf);
  rep.sigma_normal = sig;
  const WedgeSpec wh = hat_wedge(nf, hat, sigma_in, W.aperture, W.extent, W.sides);
  rep.wedge_aperture = wh.aperture;
  const CompiledWedge cw(wh);
  const CompiledPoly h(hat.h);
  std::uint64_t k = 0;
  for (double dl : cfg.deltas) {
    LewyOptions lo = cfg.lewy;
    lo.seed = cfg.seed + 17 * ++k;
    LewyDisc d = lewy_disc(hat, wh, sig, dl, true, lo);
    for (const auto& b : d.boundary) {
      if (b.side == Side::edge) {
        ++rep.edge;
        continue;
      }
      (b.side == Side::plus ? rep.plus : rep.minus)++;
      const auto res = wedge_side(cw, h, b.point, WedgeSideOptions{});
      auto axis = cw.axis_at(res.projection.params);
      std::vector<double> dvec(b.point.size());
      for (std::size_t i = 0; i < dvec.size(); ++i) dvec[i] = b.point[i] - res.projection.foot[i];
      const double along = std::fabs(dot(dvec, axis));
      double perp2 = 0;
      for (std::size_t i = 0; i < dvec.size(); ++i) {
        const double e = dvec[i] - dot(dvec, axis) * axis[i];
        perp2 += e * e;
      }
      rep.subwedge_aperture = std::max(rep.subwedge_aperture, std::sqrt(perp2) / along);
    }
    rep.discs.push_back(std::move(d));
  }
  rep.center = center_curve(nf, hat, sig, cfg.deltas, true);
  return rep;
}

}  // namespace eow

#endif  // EOW_DISCS_LEWY_HPP
