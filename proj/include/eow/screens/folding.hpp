#ifndef EOW_SCREENS_FOLDING_HPP
#define EOW_SCREENS_FOLDING_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eow/error.hpp"
#include "eow/geometry/cones.hpp"

namespace eow {

/// Analytic disc on the quadric (zeta1 + i)^2 + (zeta2 - 2i)^2 + t = 0,
/// parametrized over P_t = {x+iy : t-4+y^2/16 <= x <= 4-y^2/16}.
/// The mirrored disc is its image under zeta2 -> -zeta2.
class FoldingDisc {
 public:
  static constexpr int right_arc = 0;  // x = 4 - y^2/16, lands on eta2 = 0
  static constexpr int left_arc = 1;   // x = t - 4 + y^2/16, lands on eta1 = 1

  explicit FoldingDisc(double t, bool mirrored = false, int verify_grid = 41) : t_(t), mirrored_(mirrored) {
    if (!(t > 5.0 && t < 6.0)) {
      std::ostringstream os;
      os << "folding disc parameter t = " << t << " is outside (5,6)";
      throw PreconditionError(os.str());
    }
    verify(verify_grid);
  }

  double t() const noexcept { return t_; }
  bool mirrored() const noexcept { return mirrored_; }
  double y_max() const { return std::sqrt(8.0 * (8.0 - t_)); }
  double x_min(double y) const { return t_ - 4.0 + y * y / 16.0; }
  double x_max(double y) const { return 4.0 - y * y / 16.0; }
  bool in_domain(cplx z, double tol = 0.0) const {
    return z.real() >= x_min(z.imag()) - tol && z.real() <= x_max(z.imag()) + tol;
  }

  /// Point of the given boundary arc at height y, |y| <= y_max.
  cplx arc_point(int arc, double y) const { return {arc == right_arc ? x_max(y) : x_min(y), y}; }

  C2 operator()(cplx z) const {
    const cplx i(0.0, 1.0);
    const cplx z1 = -i + i * std::sqrt(t_ - z);
    const cplx z2 = 2.0 * i - i * std::sqrt(z);
    return {z1, mirrored_ ? -z2 : z2};
  }

  double quadric_residual(const C2& w) const {
    const cplx i(0.0, 1.0);
    const cplx z2 = mirrored_ ? -w[1] : w[1];
    return std::abs((w[0] + i) * (w[0] + i) + (z2 - 2.0 * i) * (z2 - 2.0 * i) + t_);
  }

  double hypersurface_residual(const C2& w) const {
    const double eta2 = mirrored_ ? -w[1].imag() : w[1].imag();
    const double xi2 = w[0].real() * w[0].real() + w[1].real() * w[1].real();
    return std::fabs((w[0].imag() + 1) * (w[0].imag() + 1) + (eta2 - 2) * (eta2 - 2) - xi2 - t_);
  }

  /// Checks the quadric, hypersurface and branch-range invariants on an n x n
  /// grid of P_t including both boundary arcs.
  void verify(int n) const {
    if (n < 2) return;
    constexpr double tol = 1e-12;
    const double ym = y_max();
    for (int a = 0; a < n; ++a) {
      const double y = -ym + 2.0 * ym * a / (n - 1);
      for (int b = 0; b < n; ++b) {
        const double s = static_cast<double>(b) / (n - 1);
        const cplx z(x_min(y) + s * (x_max(y) - x_min(y)), y);
        const C2 w = (*this)(z);
        const double im2 = mirrored_ ? -w[1].imag() : w[1].imag();
        auto fail = [&](const std::string& what) {
          std::ostringstream os;
          os.precision(17);
          os << "folding disc t = " << t_ << ": " << what << " at z = " << z.real() << (y < 0 ? "" : "+") << y << "i";
          throw NumericalError(os.str());
        };
        if (quadric_residual(w) > tol) fail("quadric residual");
        if (hypersurface_residual(w) > tol) fail("hypersurface residual");
        if (!(w[0].imag() > 0.0 && w[0].imag() <= 1.0 + tol)) fail("Im zeta1 outside (0,1]");
        if (!(im2 >= -tol && im2 < 1.0)) fail("Im zeta2 outside [0,1)");
        if (b == n - 1 && std::fabs(im2) > tol) fail("right arc is off the eta2 = 0 face");
        if (b == 0 && std::fabs(w[0].imag() - 1.0) > tol) fail("left arc is off the eta1 = 1 face");
      }
    }
  }

 private:
  double t_;
  bool mirrored_;
};

inline FoldingDisc folding_disc(double t) { return FoldingDisc(t); }

/// Holomorphic polynomial sum c_e z^e in any number of complex variables,
/// with float coefficients.
struct HolomorphicPoly {
  struct Term {
    std::vector<int> e;
    cplx c;
  };
  std::size_t dim = 2;
  std::vector<Term> terms;

  static HolomorphicPoly constant(cplx c, std::size_t dim = 2) { return {dim, {{std::vector<int>(dim, 0), c}}}; }
  static HolomorphicPoly zeta(std::size_t k, std::size_t dim = 2) {
    std::vector<int> e(dim, 0);
    e.at(k) = 1;
    return {dim, {{e, 1.0}}};
  }

  /// Dense polynomial of the given degree with standard normal coefficients.
  static HolomorphicPoly random(std::mt19937_64& rng, int degree, std::size_t dim = 2) {
    std::normal_distribution<double> g;
    HolomorphicPoly p{dim, {}};
    std::vector<int> e(dim, 0);
    // Enumerate exponents of total degree <= degree in lexicographic order.
    auto rec = [&](auto&& self, std::size_t i, int left) -> void {
      if (i == dim) {
        const double re = g(rng), im = g(rng);
        p.terms.push_back({e, {re, im}});
        return;
      }
      for (int k = 0; k <= left; ++k) {
        e[i] = k;
        self(self, i + 1, left - k);
      }
      e[i] = 0;
    };
    rec(rec, 0, degree);
    return p;
  }

  int degree() const {
    int d = 0;
    for (const auto& t : terms) {
      int s = 0;
      for (int k : t.e) s += k;
      d = std::max(d, s);
    }
    return d;
  }

  cplx operator()(const std::vector<cplx>& z) const {
    if (z.size() != dim) throw PreconditionError("holomorphic polynomial evaluated at a point of the wrong dimension");
    cplx s = 0;
    for (const auto& t : terms) {
      cplx m = t.c;
      for (std::size_t i = 0; i < dim; ++i)
        if (t.e[i]) m *= std::pow(z[i], t.e[i]);
      s += m;
    }
    return s;
  }
  cplx operator()(const C2& z) const { return (*this)(std::vector<cplx>{z[0], z[1]}); }
};

struct ModulusAudit {
  double worst_slack = -std::numeric_limits<double>::infinity();
  std::vector<double> slack;  // per polynomial
  int boundary_samples = 0;
  int interior_samples = 0;
};

/// Maximum-modulus audit for a disc whose boundary is the closed curve
/// s -> boundary(s), s in [0, 1). Slack is (|p(w)| - boundary max) /
/// max(1, boundary max), maximized over interior samples w; the boundary
/// maximum is refined by golden-section search around the best sample.
inline ModulusAudit curve_modulus_audit(const std::function<std::vector<cplx>(double)>& boundary,
                                        const std::vector<std::vector<cplx>>& interior,
                                        const std::vector<HolomorphicPoly>& polys, int boundary_samples,
                                        double tolerance, int max_degree, const std::string& what) {
  if (boundary_samples < 2) throw PreconditionError("audit needs at least two boundary samples");
  ModulusAudit out;
  out.boundary_samples = boundary_samples;
  out.interior_samples = static_cast<int>(interior.size());
  for (std::size_t k = 0; k < polys.size(); ++k) {
    const auto& p = polys[k];
    if (p.degree() > max_degree) throw PreconditionError("audit polynomial exceeds the configured degree bound");
    auto f = [&](double s) { return std::abs(p(boundary(s - std::floor(s)))); };
    const double h = 1.0 / boundary_samples;
    int best = 0;
    double bmax = -1;
    for (int i = 0; i < boundary_samples; ++i) {
      const double v = f(i * h);
      if (v > bmax) bmax = v, best = i;
    }
    double lo = (best - 1) * h, hi = (best + 1) * h;
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo), fc = f(c), fd = f(d);
    for (int it = 0; it < 80; ++it) {
      if (fc > fd) hi = d, d = c, fd = fc, c = hi - g * (hi - lo), fc = f(c);
      else lo = c, c = d, fc = fd, d = lo + g * (hi - lo), fd = f(d);
    }
    bmax = std::max({bmax, fc, fd});
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& z : interior) worst = std::max(worst, (std::abs(p(z)) - bmax) / std::max(1.0, bmax));
    out.slack.push_back(worst);
    out.worst_slack = std::max(out.worst_slack, worst);
    if (worst > tolerance) {
      std::ostringstream os;
      os << "maximum modulus violated on " << what << " by polynomial " << k << " (slack " << worst << ")";
      throw CertificateError(os.str());
    }
  }
  return out;
}

/// Audit on a folding disc: the boundary curve runs up the right arc and down
/// the left arc, each sampled uniformly in y; interior samples are an
/// interior_grid^2 grid of cell midpoints of P_t.
inline ModulusAudit max_modulus_audit(const FoldingDisc& disc, const std::vector<HolomorphicPoly>& polys,
                                      int interior_grid = 12, int boundary_samples = 1000, double tolerance = 1e-6,
                                      int max_degree = 8) {
  if (boundary_samples < 2 || interior_grid < 1) throw PreconditionError("audit sample counts must be positive");
  const double ym = disc.y_max();
  std::vector<std::vector<cplx>> interior;
  for (int a = 0; a < interior_grid; ++a) {
    const double y = -ym + 2.0 * ym * (a + 0.5) / interior_grid;
    for (int b = 0; b < interior_grid; ++b) {
      const double s = (b + 0.5) / interior_grid;
      const C2 w = disc(cplx(disc.x_min(y) + s * (disc.x_max(y) - disc.x_min(y)), y));
      interior.push_back({w[0], w[1]});
    }
  }
  auto boundary = [&](double s) {
    const bool right = s < 0.5;
    const double u = right ? 2 * s : 2 * s - 1;
    const double y = right ? -ym + 2 * ym * u : ym - 2 * ym * u;
    const C2 w = disc(disc.arc_point(right ? FoldingDisc::right_arc : FoldingDisc::left_arc, y));
    return std::vector<cplx>{w[0], w[1]};
  };
  std::ostringstream what;
  what << "the disc t = " << disc.t();
  return curve_modulus_audit(boundary, interior, polys, 2 * boundary_samples, tolerance, max_degree, what.str());
}

struct HullOptions {
  std::vector<double> t_grid;  // empty: 64 midpoints of (5,6)
  int boundary_samples = 1000;
  int target_grid = 50;
  ScreenSet target = ScreenSet::target();
  int audit_polynomials = 20;
  int audit_degree = 4;
  int audit_interior = 12;
  double audit_tolerance = 1e-6;
  double marginal = 1e-9;
  std::uint64_t seed = 0;

  std::vector<double> resolved_t_grid() const {
    if (!t_grid.empty()) return t_grid;
    std::vector<double> g;
    for (int k = 0; k < 64; ++k) g.push_back(5.0 + (k + 0.5) / 64.0);
    return g;
  }
};

struct DiscRecord {
  double t = 0;
  double min_margin = 0;   // screen-membership margin over both boundary arcs
  int worst_arc = 0;
  double worst_y = 0;
  double max_xi2 = 0;      // largest |xi|^2 on the boundary
  int cross_check_failures = 0;
  double audit_slack = 0;
};

enum class CoverRoute { in_screen, disc, mirrored_disc, uncovered };

inline std::string to_string(CoverRoute r) {
  switch (r) {
    case CoverRoute::in_screen: return "already in S";
    case CoverRoute::disc: return "disc";
    case CoverRoute::mirrored_disc: return "mirrored disc";
    case CoverRoute::uncovered: return "uncovered";
  }
  return "?";
}

struct CoverEntry {
  double eta1 = 0, eta2 = 0;
  CoverRoute route = CoverRoute::uncovered;
  double t = 0;       // disc through the point (informational on the screen route)
  double z = 0;       // real preimage in P_t
  double margin = 0;  // screen margin, or min(t-5, 6-t, distance of z to the boundary of P_t)
};

struct HullCertificate {
  std::string target;
  std::vector<double> t_grid;
  int boundary_samples = 0;
  int target_grid = 0;
  std::vector<DiscRecord> discs;
  std::vector<CoverEntry> coverage;
  double min_boundary_margin = std::numeric_limits<double>::infinity();
  double min_cover_margin = std::numeric_limits<double>::infinity();
  double worst_audit_slack = -std::numeric_limits<double>::infinity();
  bool valid = false;
  bool marginal = false;
  std::optional<std::string> offending;

  std::string status() const {
    if (!valid) return "invalid";
    return marginal ? "valid (marginal)" : "valid";
  }
};

/// Parameter of the disc through (i eta1, i |eta2|).
inline double covering_t(double eta1, double eta2) {
  const double h = std::fabs(eta2);
  return (eta1 + 1) * (eta1 + 1) + (h - 2) * (h - 2);
}

/// Covering route for the point (i eta1, i eta2) of T: the preliminary
/// screen itself, or the disc with t = (eta1+1)^2 + (|eta2|-2)^2 at the real
/// parameter z = (2-|eta2|)^2 (mirrored family for eta2 < 0).
inline CoverEntry cover_point(double eta1, double eta2) {
  CoverEntry e;
  e.eta1 = eta1;
  e.eta2 = eta2;
  const C2 w{cplx(0, eta1), cplx(0, eta2)};
  const double h = std::fabs(eta2);
  e.t = covering_t(eta1, eta2);
  const Membership in_s = screen_contains(ScreenSet::preliminary(), w);
  if (in_s.inside) {
    e.route = CoverRoute::in_screen;
    e.margin = in_s.margin;
    return e;
  }
  e.z = (2 - h) * (2 - h);
  e.margin = std::min({e.t - 5.0, 6.0 - e.t, e.z - (e.t - 4.0), 4.0 - e.z});
  if (e.margin > 0) {
    const FoldingDisc disc(e.t, eta2 < 0, 0);
    const C2 img = disc(cplx(e.z, 0));
    if (std::abs(img[0] - w[0]) < 1e-12 && std::abs(img[1] - w[1]) < 1e-12)
      e.route = eta2 < 0 ? CoverRoute::mirrored_disc : CoverRoute::disc;
  }
  return e;
}

namespace detail {

inline std::string describe_sample(const std::string& what, double a, double b) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (" << a << ", " << b << ")";
  return os.str();
}

}  // namespace detail

/// Certifies that the discs of the family have boundaries in the preliminary
/// screen S, that they cover the target samples outside S, and that each
/// disc passes the maximum-modulus audit.
inline HullCertificate verify_screen_hull(const HullOptions& opt = {}) {
  if (opt.target.shape != ScreenShape::target && opt.target.shape != ScreenShape::target_delta)
    throw PreconditionError("hull target must be T or a scaled copy T_delta");
  if (opt.target.shape == ScreenShape::target_delta && opt.target.delta > 1.0)
    throw PreconditionError("T_delta with delta > 1 is not contained in T");
  if (opt.boundary_samples < 2 || opt.target_grid < 1) throw PreconditionError("sample grids must be nonempty");
  const auto grid = opt.resolved_t_grid();
  for (double t : grid)
    if (!(t > 5.0 && t < 6.0)) throw PreconditionError("t grid must lie in (5,6)");

  HullCertificate cert;
  cert.target = opt.target.shape == ScreenShape::target ? "T" : "T_delta(" + std::to_string(opt.target.delta) + ")";
  cert.t_grid = grid;
  cert.boundary_samples = opt.boundary_samples;
  cert.target_grid = opt.target_grid;
  const ScreenSet S = ScreenSet::preliminary();
  auto offend = [&](std::string s) {
    if (!cert.offending) cert.offending = std::move(s);
  };

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const FoldingDisc disc(grid[k]);
    DiscRecord rec;
    rec.t = disc.t();
    rec.min_margin = std::numeric_limits<double>::infinity();
    const double ym = disc.y_max();
    for (int arc : {FoldingDisc::right_arc, FoldingDisc::left_arc}) {
      for (int i = 0; i < opt.boundary_samples; ++i) {
        const double y = -ym + 2.0 * ym * i / (opt.boundary_samples - 1);
        const C2 w = disc(disc.arc_point(arc, y));
        const double xi2 = w[0].real() * w[0].real() + w[1].real() * w[1].real();
        rec.max_xi2 = std::max(rec.max_xi2, xi2);
        const Membership m = screen_contains(S, w);
        if (m.margin < rec.min_margin) rec.min_margin = m.margin, rec.worst_arc = arc, rec.worst_y = y;
        // Inequality pair behind the containment; the arc lies on the face
        // through sqrt(|xi|^2 + t - 4).
        const double root1 = std::sqrt(xi2 + 1.0), roott = std::sqrt(xi2 + rec.t - 4.0);
        bool ok = xi2 / 8.0 <= root1 - 1.0 + 1e-15 && root1 < roott && 2.0 - xi2 / 4.0 > 2.0 - root1;
        if (arc == FoldingDisc::right_arc) ok = ok && std::fabs(w[0].imag() - (roott - 1.0)) < 1e-12;
        else ok = ok && std::fabs(w[1].imag() - (2.0 - roott)) < 1e-12;
        if (!ok) {
          ++rec.cross_check_failures;
          offend(detail::describe_sample("boundary cross-check fails at (t, y)", rec.t, y));
        }
      }
    }
    if (!(rec.min_margin > 0)) offend(detail::describe_sample("disc boundary leaves S at (t, y)", rec.t, rec.worst_y));
    cert.min_boundary_margin = std::min(cert.min_boundary_margin, rec.min_margin);

    std::mt19937_64 rng(opt.seed + k);
    std::vector<HolomorphicPoly> polys;
    for (int p = 0; p < opt.audit_polynomials; ++p) polys.push_back(HolomorphicPoly::random(rng, opt.audit_degree));
    try {
      rec.audit_slack = max_modulus_audit(disc, polys, opt.audit_interior, opt.boundary_samples, opt.audit_tolerance,
                                          opt.audit_degree)
                            .worst_slack;
    } catch (const CertificateError& e) {
      rec.audit_slack = std::numeric_limits<double>::infinity();
      offend(e.what());
    }
    cert.worst_audit_slack = std::max(cert.worst_audit_slack, rec.audit_slack);
    cert.discs.push_back(rec);
  }

  const double d = opt.target.shape == ScreenShape::target ? 1.0 : opt.target.delta;
  const double slope = opt.target.shape == ScreenShape::target ? 0.5 : opt.target.delta;
  const int n = opt.target_grid;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double eta1 = d * (a + 0.5) / n;
      const CoverEntry e = cover_point(eta1, slope * eta1 * (2.0 * b + 1.0 - n) / n);
      if (e.route == CoverRoute::uncovered) offend(detail::describe_sample("uncovered target sample", e.eta1, e.eta2));
      cert.min_cover_margin = std::min(cert.min_cover_margin, e.margin);
      cert.coverage.push_back(e);
    }

  cert.valid = !cert.offending.has_value();
  cert.marginal = cert.valid && std::min(cert.min_boundary_margin, cert.min_cover_margin) < opt.marginal;
  return cert;
}

struct TracePoint {
  double t = 0;
  int arc = 0;
  double eta1 = 0, eta2 = 0;
};

/// (eta1, eta2) images of both boundary arcs of each disc.
inline std::vector<TracePoint> disc_traces(const std::vector<double>& t_grid, int samples) {
  std::vector<TracePoint> out;
  for (double t : t_grid) {
    const FoldingDisc disc(t, false, 0);
    const double ym = disc.y_max();
    for (int arc : {FoldingDisc::right_arc, FoldingDisc::left_arc})
      for (int i = 0; i < samples; ++i) {
        const double y = samples == 1 ? 0.0 : -ym + 2.0 * ym * i / (samples - 1);
        const C2 w = disc(disc.arc_point(arc, y));
        out.push_back({t, arc, w[0].imag(), w[1].imag()});
      }
  }
  return out;
}

}  // namespace eow

#endif  // EOW_SCREENS_FOLDING_HPP
