#ifndef EOW_GEOMETRY_CONES_HPP
#define EOW_GEOMETRY_CONES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "eow/error.hpp"

namespace eow {

/// Outcome of a strict membership test; margin is the smallest inequality
/// slack, so inside == (margin > 0).
struct Membership {
  bool inside = false;
  double margin = 0.0;
  explicit operator bool() const noexcept { return inside; }
};

inline Membership membership_from_slacks(std::initializer_list<double> slacks) {
  double m = *std::min_element(slacks.begin(), slacks.end());
  return {m > 0.0, m};
}

inline double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::vector<double> normalized(std::vector<double> v) {
  const double n = norm2(v);
  if (n == 0.0) throw PreconditionError("cannot normalize the zero vector");
  for (double& x : v) x /= n;
  return v;
}

/// Open round cone {vertex + d : |d - <d,s>s| < delta <d,s>, |d| < extent}.
struct RoundConeSpec {
  std::vector<double> axis;
  double aperture = 1.0;
  double extent = 1.0;
  std::vector<double> vertex;

  RoundConeSpec() = default;
  RoundConeSpec(std::vector<double> ax, double delta, double ell, std::vector<double> vx = {})
      : axis(std::move(ax)), aperture(delta), extent(ell), vertex(std::move(vx)) {
    if (vertex.empty()) vertex.assign(axis.size(), 0.0);
    validate();
  }

  std::size_t dim() const noexcept { return axis.size(); }

  void validate() const {
    if (std::fabs(norm2(axis) - 1.0) > 1e-12) throw PreconditionError("cone axis must be a unit vector");
    if (!(aperture > 0.0) || !(extent > 0.0)) throw PreconditionError("cone aperture and extent must be positive");
    if (vertex.size() != axis.size()) throw PreconditionError("cone vertex dimension differs from axis dimension");
  }
};

inline Membership cone_contains(const RoundConeSpec& c, const std::vector<double>& x) {
  if (x.size() != c.dim()) throw PreconditionError("point dimension differs from cone dimension");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - c.vertex[i];
  const double along = dot(d, c.axis);
  double perp2 = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double e = d[i] - along * c.axis[i];
    perp2 += e * e;
  }
  return membership_from_slacks({c.aperture * along - std::sqrt(perp2), c.extent - norm2(d)});
}

/// Planar spike Sp(beta, ell, q1, q2, m).
struct SpikeSpec {
  double beta = 1.0;
  double length = 1.0;
  double q1 = 0.0, q2 = 0.0;
  double slope = 0.0;

  void validate() const {
    if (!(beta > 0.0) || !(length > 0.0)) throw PreconditionError("spike sharpness and length must be positive");
  }
};

inline Membership spike_contains(const SpikeSpec& s, double eta1, double eta2) {
  const double a = eta1 - s.q1, b = eta2 - s.q2;
  return membership_from_slacks({a, s.length - std::hypot(a, b), s.beta * a * a - std::fabs(b - s.slope * a)});
}

enum class ScreenShape { preliminary, scaled, target, target_delta };

inline std::string to_string(ScreenShape s) {
  switch (s) {
    case ScreenShape::preliminary: return "preliminary";
    case ScreenShape::scaled: return "scaled";
    case ScreenShape::target: return "target";
    case ScreenShape::target_delta: return "target_delta";
  }
  return "?";
}

/// Screen-type subsets of C^2: the preliminary screen, S_{eps,K}, the target
/// T and its scaled copy T_delta.
struct ScreenSet {
  ScreenShape shape = ScreenShape::preliminary;
  double eps = 2.0;
  double K = 0.25;
  double delta = 1.0;

  static ScreenSet preliminary() { return {ScreenShape::preliminary, 2.0, 0.25, 1.0}; }
  static ScreenSet scaled(double eps, double K) {
    if (!(eps > 0.0) || !(K > 0.0)) throw PreconditionError("screen parameters must be positive");
    return {ScreenShape::scaled, eps, K, 1.0};
  }
  static ScreenSet target() { return {ScreenShape::target, 1.0, 1.0, 1.0}; }
  static ScreenSet target_delta(double delta) {
    if (!(delta > 0.0)) throw PreconditionError("target size must be positive");
    return {ScreenShape::target_delta, 1.0, 1.0, delta};
  }
};

using cplx = std::complex<double>;
using C2 = std::array<cplx, 2>;

inline Membership screen_contains(const ScreenSet& s, const C2& z) {
  const double xi2 = std::norm(std::complex<double>(z[0].real(), z[1].real()));
  const double eta1 = z[0].imag(), eta2 = z[1].imag();
  switch (s.shape) {
    case ScreenShape::preliminary:
      return membership_from_slacks({eta1, 2.0 - eta1, 2.0 * eta1 * eta1 - xi2 * eta1 / 4.0 - std::fabs(eta2)});
    case ScreenShape::scaled:
      return membership_from_slacks({eta1, s.eps - eta1, s.eps * eta1 * eta1 - s.K * xi2 * eta1 - std::fabs(eta2)});
    case ScreenShape::target:
    case ScreenShape::target_delta: {
      const double d = s.shape == ScreenShape::target ? 1.0 : s.delta;
      const double slope = s.shape == ScreenShape::target ? 0.5 : s.delta;
      if (xi2 > 0.0) return {false, -std::sqrt(xi2)};
      return membership_from_slacks({eta1, d - eta1, slope * eta1 - std::fabs(eta2)});
    }
  }
  return {};
}

}  // namespace eow

#endif  // EOW_GEOMETRY_CONES_HPP
