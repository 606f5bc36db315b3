#ifndef EOW_NORMAL_FORM_MODEL_HPP
#define EOW_NORMAL_FORM_MODEL_HPP

#include <string>
#include <vector>

#include "eow/error.hpp"
#include "eow/geometry/coords.hpp"
#include "eow/geometry/edge.hpp"
#include "eow/series/poly_map.hpp"

namespace eow {

/// Hypersurface M = {r = 0} in C^{n+1} with an attached edge E and a base
/// point on E given by its edge parameters (x, u).
struct HypersurfaceModel {
  int n = 2;
  int cap = 6;
  TruncatedPoly r;  // over x1..xn, y1..yn, u, v
  EdgeModel edge;
  std::vector<Scalar> base;  // edge parameters of the base point

  /// M = {v = h(x, y, u)} with defining function -v + h.
  static HypersurfaceModel from_graph(const TruncatedPoly& h, EdgeModel edge, std::vector<Scalar> base = {}) {
    Coords c(edge.n);
    if (h.vars() != c.graph()) throw VariableMismatch("graph must be a polynomial in x, y, u", "");
    HypersurfaceModel m;
    m.n = edge.n;
    m.cap = h.cap();
    m.r = embed_vars(h, c.ambient()) - TruncatedPoly::variable(c.ambient(), h.cap(), "v");
    m.edge = std::move(edge);
    m.base = base.empty() ? std::vector<Scalar>(static_cast<std::size_t>(m.n + 1), Scalar(0)) : std::move(base);
    return m;
  }

  Coords coords() const { return Coords(n); }

  /// r restricted to E, as a polynomial in the edge parameters.
  TruncatedPoly edge_residual() const { return compose_truncated(r, edge.embedding(), cap); }

  /// Ambient coordinates of the base point.
  std::vector<Scalar> base_point() const {
    Coords c(n);
    std::vector<Scalar> p(c.dim());
    PolyMap emb = edge.embedding();
    for (std::size_t i = 0; i < c.dim(); ++i) p[i] = eval_poly(emb.components[i], base);
    return p;
  }

  /// Gradient of r at the base point.
  std::vector<Scalar> gradient_at_base() const {
    auto p = base_point();
    std::vector<Scalar> g;
    for (std::size_t i = 0; i < r.nvars(); ++i) g.push_back(eval_poly(r.derivative(i), p));
    return g;
  }

  void validate() const {
    Coords c(n);
    if (n < 2)
      throw PreconditionError(
          "n < 2: an indefinite Levi form needs at least two complex tangential directions, so the extension "
          "hypotheses cannot be satisfied in C^2");
    if (cap < 4) throw PreconditionError("degree cap must be at least 4");
    if (r.vars() != c.ambient()) throw VariableMismatch("defining function must be over x, y, u, v", "");
    edge.validate();
    if (edge.n != n) throw PreconditionError("edge dimension differs from hypersurface dimension");
    if (base.size() != static_cast<std::size_t>(n + 1)) throw PreconditionError("base point needs n+1 edge parameters");
    auto resid = edge_residual();
    if (!resid.is_zero())
      throw PreconditionError("edge is not contained in the hypersurface: r restricted to E = " + resid.str());
    bool nonzero = false;
    for (const auto& gi : gradient_at_base())
      if (gi != 0) nonzero = true;
    if (!nonzero) throw PreconditionError("defining function has vanishing gradient at the base point");
  }
};

}  // namespace eow

#endif  // EOW_NORMAL_FORM_MODEL_HPP
