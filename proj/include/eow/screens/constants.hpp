#ifndef EOW_SCREENS_CONSTANTS_HPP
#define EOW_SCREENS_CONSTANTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eow/error.hpp"
#include "eow/geometry/cones.hpp"
#include "eow/series/poly_map.hpp"

namespace eow {

/// Linear change phi(zeta) = (A zeta1, 2 A^2 zeta2 / eps) carrying S_{eps,K}
/// into the preliminary screen, and the size delta of a target copy T_delta
/// that phi maps into T.
struct ScalingConstants {
  Scalar eps, K, A, delta;

  C2 phi(const C2& z) const {
    const double a = to_double(A), e = to_double(eps);
    return {a * z[0], 2.0 * a * a * z[1] / e};
  }
  C2 phi_inverse(const C2& z) const {
    const double a = to_double(A), e = to_double(eps);
    return {z[0] / a, e * z[1] / (2.0 * a * a)};
  }
};

inline ScalingConstants scaling_constants(const Scalar& eps, const Scalar& K) {
  if (eps <= 0 || K <= 0) throw PreconditionError("scaling constants need eps > 0 and K > 0");
  ScalingConstants c{eps, K, 0, 0};
  c.A = std::max<Scalar>({Scalar(2) / eps, eps / 2, 8 * K / eps});
  c.delta = std::min<Scalar>(1 / c.A, eps / (4 * c.A));
  return c;
}

struct ScalingAudit {
  int samples = 0;
  int screen_failures = 0;  // points of phi^{-1}(S) outside S_{eps,K}
  int target_failures = 0;  // points of T_delta whose image leaves T
  double min_screen_margin = std::numeric_limits<double>::infinity();
  double min_target_margin = std::numeric_limits<double>::infinity();
  bool passed() const { return screen_failures == 0 && target_failures == 0; }
};

/// Random check of phi^{-1}(S) in S_{eps,K} and T_delta in phi^{-1}(T).
inline ScalingAudit scaling_sample_check(const ScalingConstants& c, int samples, std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0), sym(-1.0, 1.0);
  const ScreenSet S = ScreenSet::preliminary(), Sek = ScreenSet::scaled(to_double(c.eps), to_double(c.K)),
                  T = ScreenSet::target();
  const double delta = to_double(c.delta);
  ScalingAudit out;
  out.samples = samples;
  for (int i = 0; i < samples; ++i) {
    // Point of S: |xi|^2 < 8 eta1 keeps the eta2 window open.
    double eta1 = 2.0 * u01(rng);
    if (eta1 == 0.0) eta1 = 1e-300;
    const double rad = std::sqrt(8.0 * eta1) * std::sqrt(u01(rng)), ang = 2.0 * M_PI * u01(rng);
    const double xi1 = rad * std::cos(ang), xi2 = rad * std::sin(ang);
    const double eta2 = sym(rng) * (2.0 * eta1 * eta1 - (xi1 * xi1 + xi2 * xi2) * eta1 / 4.0);
    const C2 s{cplx(xi1, eta1), cplx(xi2, eta2)};
    if (screen_contains(S, s).inside) {
      const Membership m = screen_contains(Sek, c.phi_inverse(s));
      out.min_screen_margin = std::min(out.min_screen_margin, m.margin);
      if (!m.inside) ++out.screen_failures;
    }

    double t1 = delta * u01(rng);
    if (t1 == 0.0) t1 = delta * 1e-12;
    const C2 p{cplx(0, t1), cplx(0, sym(rng) * delta * t1)};
    const Membership m = screen_contains(T, c.phi(p));
    out.min_target_margin = std::min(out.min_target_margin, m.margin);
    if (!m.inside) ++out.target_failures;
  }
  return out;
}

struct InequalityCheck {
  std::string name;
  Scalar lhs, rhs;
  std::string relation;  // "<", "<=", ">", ">="
  bool holds = false;
};

inline InequalityCheck make_check(std::string name, const Scalar& lhs, std::string rel, const Scalar& rhs) {
  bool h = false;
  if (rel == "<") h = lhs < rhs;
  else if (rel == "<=") h = lhs <= rhs;
  else if (rel == ">") h = lhs > rhs;
  else if (rel == ">=") h = lhs >= rhs;
  else throw PreconditionError("unknown relation " + rel);
  return {std::move(name), lhs, rhs, std::move(rel), h};
}

struct SpikeConstants {
  Scalar A, beta, ell, r;
  Scalar eps, K, delta;
  std::vector<InequalityCheck> audit;
  bool all_hold() const {
    return std::all_of(audit.begin(), audit.end(), [](const InequalityCheck& c) { return c.holds; });
  }
};

/// Exact re-check of the seven conditions the constant chain needs.
inline std::vector<InequalityCheck> spike_audit(const Scalar& A, const Scalar& beta, const Scalar& ell,
                                                const Scalar& r, const Scalar& eps, const Scalar& K) {
  return {
      make_check("eps <= 1", eps, "<=", 1),
      make_check("eps < beta/2", eps, "<", beta / 2),
      make_check("K >= 1/r^2", K, ">=", 1 / (r * r)),
      make_check("K >= A", K, ">=", A),
      make_check("K > (2 beta + 1) A", K, ">", (2 * beta + 1) * A),
      make_check("K^2/eps^2 >= 2(A + A^2)/beta", K * K / (eps * eps), ">=", 2 * (A + A * A) / beta),
      make_check("2 eps + A(1/K + 1/K^2) < ell", 2 * eps + A * (1 / K + 1 / (K * K)), "<", ell),
  };
}

/// eps = min(1, beta/4, ell/4) and K the smallest power of two meeting every
/// K condition; delta comes from the scaling change for (eps, K).
inline SpikeConstants spike_constants(const Scalar& A, const Scalar& beta, const Scalar& ell, const Scalar& r) {
  if (A <= 0 || beta <= 0 || ell <= 0 || r <= 0) throw PreconditionError("spike constants need A, beta, ell, r > 0");
  SpikeConstants out{A, beta, ell, r, 0, 0, 0, {}};
  out.eps = std::min<Scalar>({Scalar(1), beta / 4, ell / 4});
  const Scalar lower = std::max<Scalar>(A, 1 / (r * r));
  Scalar K = 1;
  while (K < lower) K *= 2;
  while (K / 2 >= lower) K /= 2;
  auto ok = [&](const Scalar& k) {
    const auto checks = spike_audit(A, beta, ell, r, out.eps, k);
    return std::all_of(checks.begin() + 2, checks.end(), [](const InequalityCheck& c) { return c.holds; });
  };
  while (!ok(K)) K *= 2;
  out.K = K;
  out.delta = scaling_constants(out.eps, out.K).delta;
  out.audit = spike_audit(A, beta, ell, r, out.eps, out.K);
  return out;
}

struct SpikeFamily {
  TruncatedPoly q1, q2, m;  // polynomials in xi1, xi2
};

struct SpikeUnionReport {
  int samples = 0;
  int bound_samples = 0;
  int failures = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::array<double, 4> worst{};  // xi1, xi2, eta1, eta2 at the smallest margin
  bool passed() const { return failures == 0 && min_margin > 0; }
};

/// Samples S_{eps,K} and checks every point lies in the spike at its own xi.
/// The growth bounds on q1, q2, m are checked first on the disc |xi| <= r.
inline SpikeUnionReport spike_union_check(const Scalar& eps, const Scalar& K, const SpikeFamily& fam, const Scalar& A,
                                          const Scalar& beta, const Scalar& ell, const Scalar& r, int samples,
                                          std::uint64_t seed = 0) {
  if (eps <= 0 || K <= 0 || A <= 0 || beta <= 0 || ell <= 0 || r <= 0)
    throw PreconditionError("spike union check needs positive constants");
  const CompiledPoly q1(fam.q1), q2(fam.q2), m(fam.m);
  for (const auto* p : {&fam.q1, &fam.q2, &fam.m})
    if (p->nvars() != 2) throw PreconditionError("spike family polynomials must be in two variables xi1, xi2");

  const double a = to_double(A), rr = to_double(r);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0), sym(-1.0, 1.0);
  SpikeUnionReport out;

  auto bound_check = [&](double x1, double x2) {
    const std::array<double, 2> xi{x1, x2};
    const double n2 = x1 * x1 + x2 * x2;
    struct B {
      const char* name;
      double value, bound;
    };
    for (const B& b : {B{"|q1(xi)| <= A|xi|^2", std::fabs(q1(std::span<const double>(xi))), a * n2},
                       B{"|q2(xi)| <= A|xi|^4", std::fabs(q2(std::span<const double>(xi))), a * n2 * n2},
                       B{"|m(xi)| <= A|xi|^2", std::fabs(m(std::span<const double>(xi))), a * n2}}) {
      if (b.value > b.bound * (1 + 1e-12) + 1e-300) {
        std::ostringstream os;
        os.precision(17);
        os << "spike family violates " << b.name << " at xi = (" << x1 << ", " << x2 << "): " << b.value << " > "
           << b.bound;
        throw PreconditionError(os.str());
      }
    }
    ++out.bound_samples;
  };
  const int grid = 41;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double x1 = rr * (2.0 * i / (grid - 1) - 1), x2 = rr * (2.0 * j / (grid - 1) - 1);
      if (x1 * x1 + x2 * x2 <= rr * rr) bound_check(x1, x2);
    }
  for (int i = 0; i < 4096; ++i) {
    const double rad = rr * std::sqrt(u01(rng)), ang = 2.0 * M_PI * u01(rng);
    bound_check(rad * std::cos(ang), rad * std::sin(ang));
  }

  const double e = to_double(eps), k = to_double(K);
  SpikeSpec spec;
  spec.beta = to_double(beta);
  spec.length = to_double(ell);
  out.samples = samples;
  for (int i = 0; i < samples; ++i) {
    // Half uniform in eta1, half log-uniform towards the vertex.
    double eta1 = i % 2 == 0 ? e * u01(rng) : e * std::pow(10.0, -8.0 * u01(rng));
    if (eta1 == 0.0) eta1 = e * 1e-12;
    const double rad = std::sqrt(e * eta1 / k) * std::sqrt(u01(rng)), ang = 2.0 * M_PI * u01(rng);
    const double x1 = rad * std::cos(ang), x2 = rad * std::sin(ang);
    const double eta2 = sym(rng) * (e * eta1 * eta1 - k * rad * rad * eta1);
    if (!screen_contains(ScreenSet::scaled(e, k), C2{cplx(x1, eta1), cplx(x2, eta2)}).inside) continue;
    const std::array<double, 2> xi{x1, x2};
    spec.q1 = q1(std::span<const double>(xi));
    spec.q2 = q2(std::span<const double>(xi));
    spec.slope = m(std::span<const double>(xi));
    const Membership mem = spike_contains(spec, eta1, eta2);
    if (!mem.inside) ++out.failures;
    if (mem.margin < out.min_margin) {
      out.min_margin = mem.margin;
      out.worst = {x1, x2, eta1, eta2};
    }
  }
  return out;
}

}  // namespace eow

#endif  // EOW_SCREENS_CONSTANTS_HPP
