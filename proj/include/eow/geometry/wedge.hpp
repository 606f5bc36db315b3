#ifndef EOW_GEOMETRY_WEDGE_HPP
#define EOW_GEOMETRY_WEDGE_HPP

#include <cmath>
#include <string>
#include <vector>

#include "eow/error.hpp"
#include "eow/geometry/cones.hpp"
#include "eow/geometry/coords.hpp"
#include "eow/geometry/edge.hpp"

namespace eow {

enum class Sides { plus, minus, two };
enum class Side { plus, minus, none, edge };

inline std::string to_string(Sides s) {
  switch (s) {
    case Sides::plus: return "plus";
    case Sides::minus: return "minus";
    case Sides::two: return "two";
  }
  return "?";
}

inline std::string to_string(Side s) {
  switch (s) {
    case Side::plus: return "plus";
    case Side::minus: return "minus";
    case Side::none: return "none";
    case Side::edge: return "edge";
  }
  return "?";
}

/// Wedge in M along the edge: at each edge point q the cone with axis
/// +-sigma(q), given aperture and extent. The axis field is either n
/// polynomials (coefficients of d/dy_j) or 2n+2 ambient components.
struct WedgeSpec {
  EdgeModel edge;
  std::vector<TruncatedPoly> axis;
  double aperture = 1.0;
  double extent = 1.0;
  Sides sides = Sides::two;

  void validate() const {
    edge.validate();
    const auto n = static_cast<std::size_t>(edge.n);
    if (axis.size() != n && axis.size() != 2 * n + 2)
      throw PreconditionError("wedge axis needs n or 2n+2 components");
    if (!(aperture > 0.0) || !(extent > 0.0)) throw PreconditionError("wedge aperture and extent must be positive");
    bool nonzero = false;
    for (const auto& a : axis)
      if (a.constant_term() != 0) nonzero = true;
    if (!nonzero) throw PreconditionError("wedge axis vanishes at the base point");
  }

  /// Exact ambient axis vector at the origin of the edge parameters.
  std::vector<Scalar> axis_at_origin() const {
    Coords c(edge.n);
    std::vector<Scalar> s(c.dim(), Scalar(0));
    if (axis.size() == c.dim()) {
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = axis[i].constant_term();
    } else {
      for (int k = 0; k < edge.n; ++k) s[c.y(k)] = axis[static_cast<std::size_t>(k)].constant_term();
    }
    return s;
  }
};

/// Float evaluator for wedge_side queries.
class CompiledWedge {
 public:
  explicit CompiledWedge(const WedgeSpec& w) : spec_(w), edge_(w.edge) {
    w.validate();
    for (const auto& a : w.axis) axis_.emplace_back(a);
  }

  const WedgeSpec& spec() const { return spec_; }
  const CompiledEdge& edge() const { return edge_; }

  /// Unit ambient axis at edge parameters a.
  std::vector<double> axis_at(const std::vector<double>& a) const {
    Coords c(spec_.edge.n);
    std::vector<double> s(c.dim(), 0.0);
    if (axis_.size() == c.dim()) {
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = axis_[i](a);
    } else {
      for (int k = 0; k < spec_.edge.n; ++k) s[c.y(k)] = axis_[static_cast<std::size_t>(k)](a);
    }
    return normalized(s);
  }

 private:
  WedgeSpec spec_;
  CompiledEdge edge_;
  std::vector<CompiledPoly> axis_;
};

struct WedgeSideResult {
  Side side = Side::none;
  double margin = 0.0;  // cone margin on the reported side (best of the two otherwise)
  EdgeProjection projection;
};

struct WedgeSideOptions {
  EdgeProjectionOptions projection;
  double graph_tolerance = 1e-10;
  double edge_tolerance = 0.0;  // distances at or below this report Side::edge
};

/// Side of W containing p, where p lies on M = {v = h(x, y, u)}.
inline WedgeSideResult wedge_side(const CompiledWedge& w, const CompiledPoly& h, const std::vector<double>& p,
                                  const WedgeSideOptions& opt = {}) {
  Coords c(w.spec().edge.n);
  if (p.size() != c.dim()) throw PreconditionError("point dimension differs from ambient dimension");
  std::vector<double> graph_pt(p.begin(), p.end() - 1);
  const double resid = p[c.v()] - h(graph_pt);
  if (std::fabs(resid) > opt.graph_tolerance)
    throw PreconditionError("point is not on the hypersurface (residual " + std::to_string(resid) + ")");

  WedgeSideResult out;
  out.projection = edge_distance(p, w.edge(), opt.projection);
  if (out.projection.distance <= opt.edge_tolerance) {
    out.side = Side::edge;
    return out;
  }
  const auto axis = w.axis_at(out.projection.params);
  std::vector<double> neg(axis.size());
  for (std::size_t i = 0; i < axis.size(); ++i) neg[i] = -axis[i];
  const double ap = w.spec().aperture, ext = w.spec().extent;
  Membership plus{}, minus{};
  plus.margin = minus.margin = -INFINITY;
  if (w.spec().sides != Sides::minus) plus = cone_contains(RoundConeSpec(axis, ap, ext, out.projection.foot), p);
  if (w.spec().sides != Sides::plus) minus = cone_contains(RoundConeSpec(neg, ap, ext, out.projection.foot), p);
  if (plus.inside) {
    out.side = Side::plus;
    out.margin = plus.margin;
  } else if (minus.inside) {
    out.side = Side::minus;
    out.margin = minus.margin;
  } else {
    out.side = Side::none;
    out.margin = std::max(plus.margin, minus.margin);
  }
  return out;
}

}  // namespace eow

#endif  // EOW_GEOMETRY_WEDGE_HPP
