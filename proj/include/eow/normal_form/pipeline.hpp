#ifndef EOW_NORMAL_FORM_PIPELINE_HPP
#define EOW_NORMAL_FORM_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "eow/error.hpp"
#include "eow/normal_form/model.hpp"
#include "eow/series/complex_poly.hpp"

namespace eow {

struct FrameOptions {
  std::optional<std::vector<Scalar>> tau;   // ambient vector in J(T_pE), transverse to M
  std::optional<std::vector<Scalar>> axis;  // ambient wedge axis in N_p, sent to +d/dy_1
};

/// Complex-linear frame: R maps new coordinates to translated old ones, with
/// columns the images of d/dx_j, d/dy_j, d/du, d/dv.
struct LinearFrame {
  QMatrix R;
  PolyMap map;
  Scalar r_scale = 1;
  bool orientation_flipped = false;
  std::vector<std::vector<Scalar>> basis;  // e_1..e_{n+1} in T_pE
};

struct QuadraticData {
  QMatrix Lambda, Omega, Gamma;
  std::vector<Scalar> mu;
};

struct NormalFormData {
  int n = 2;
  int cap = 6;
  std::vector<Scalar> translation;  // base point in the input coordinates
  LinearFrame frame;
  PolyMap osculating;     // hat coordinates -> frame coordinates
  PolyMap final_change;   // normal coordinates -> hat coordinates
  PolyMap chain;          // normal coordinates -> input coordinates minus translation
  PolyMap chain_inverse;
  TruncatedPoly r;        // transported, scaled defining function
  TruncatedPoly h;        // M = {v = h(x, y, u)}
  EdgeModel edge;         // normalized edge graphs
  QMatrix Lambda, Omega;
  QMatrix Gamma;          // intermediate data removed by the final change
  std::vector<Scalar> mu;
};

namespace detail {

inline std::vector<Scalar> ambient_linear_coeffs(const TruncatedPoly& p) {
  std::vector<Scalar> g(p.nvars());
  for (std::size_t i = 0; i < p.nvars(); ++i) {
    Exponent e(p.nvars(), 0);
    e[i] = 1;
    g[i] = p.coefficient(e);
  }
  return g;
}

inline PolyMap shift_map(const Vars& vars, const std::vector<Scalar>& by, int cap) {
  PolyMap m = PolyMap::identity(vars, cap);
  for (std::size_t i = 0; i < vars.size(); ++i) m.components[i] += TruncatedPoly::constant(vars, cap, by[i]);
  return m;
}

/// The model moved so that the base point is the origin.
inline HypersurfaceModel translated(const HypersurfaceModel& M) {
  Coords c(M.n);
  HypersurfaceModel T = M;
  const auto P = M.base_point();
  T.r = compose_truncated(M.r, shift_map(c.ambient(), P, M.cap), M.cap);
  PolyMap shift = shift_map(c.edge(), M.base, M.cap);
  for (std::size_t k = 0; k < M.edge.f.size(); ++k) {
    T.edge.f[k] = compose_truncated(M.edge.f[k], shift, M.cap);
    T.edge.f[k] -= TruncatedPoly::constant(c.edge(), M.cap, T.edge.f[k].constant_term());
  }
  T.edge.g = compose_truncated(M.edge.g, shift, M.cap);
  T.edge.g -= TruncatedPoly::constant(c.edge(), M.cap, T.edge.g.constant_term());
  T.base.assign(M.base.size(), Scalar(0));
  return T;
}

/// Tangent vectors d/da_k of the edge parametrization at the origin.
inline std::vector<std::vector<Scalar>> edge_tangents(const EdgeModel& e) {
  Coords c(e.n);
  std::vector<std::vector<Scalar>> t;
  for (int k = 0; k <= e.n; ++k) {
    std::vector<Scalar> v(c.dim(), Scalar(0));
    v[c.re(k)] = 1;
    Exponent ex(static_cast<std::size_t>(e.n + 1), 0);
    ex[static_cast<std::size_t>(k)] = 1;
    for (int j = 0; j < e.n; ++j) v[c.y(j)] = e.f[static_cast<std::size_t>(j)].coefficient(ex);
    v[c.v()] = e.g.coefficient(ex);
    t.push_back(std::move(v));
  }
  return t;
}

inline QMatrix columns(const std::vector<std::vector<Scalar>>& cols) {
  QMatrix m(cols.front().size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < cols[j].size(); ++i) m(i, j) = cols[j][i];
  return m;
}

/// Graph form of an edge given by an embedding a -> ambient point through 0.
inline EdgeModel regraph(const PolyMap& emb, int n, int cap) {
  Coords c(n);
  PolyMap xu{emb.source, c.edge(), {}};
  for (int k = 0; k <= n; ++k) xu.components.push_back(emb.components[c.re(k)]);
  PolyMap inv = invert_map_truncated(xu, cap);
  EdgeModel e{n, {}, TruncatedPoly(c.edge(), cap)};
  for (int k = 0; k < n; ++k) e.f.push_back(compose_truncated(emb.components[c.y(k)], inv, cap));
  e.g = compose_truncated(emb.components[c.v()], inv, cap);
  return e;
}

/// Complex coordinates z_1..z_n, w as complex polynomials over the ambient variables.
inline std::vector<ComplexPoly> complex_coordinates(const Coords& c, int cap) {
  const Vars amb = c.ambient();
  std::vector<ComplexPoly> z;
  for (int k = 0; k <= c.n; ++k)
    z.emplace_back(TruncatedPoly::variable(amb, cap, amb[c.re(k)]), TruncatedPoly::variable(amb, cap, amb[c.im(k)]));
  return z;
}

/// Real form of the holomorphic map (z, w) -> (z + dz(z, w), w + dw(z, w)).
inline PolyMap holomorphic_shift(const Coords& c, const std::vector<ComplexPoly>& dz, const ComplexPoly& dw, int cap) {
  PolyMap m = PolyMap::identity(c.ambient(), cap);
  for (int k = 0; k <= c.n; ++k) {
    const ComplexPoly& d = k < c.n ? dz[static_cast<std::size_t>(k)] : dw;
    m.components[c.re(k)] += d.re;
    m.components[c.im(k)] += d.im;
  }
  return m;
}

inline void require_osculating(const EdgeModel& e, const std::string& stage) {
  auto check = [&](const TruncatedPoly& p) {
    if (p.order() <= 3) throw NumericalError("edge does not osculate to order three after " + stage + ": " + p.str());
  };
  for (const auto& f : e.f) check(f);
  check(e.g);
}

}  // namespace detail

/// Translation plus complex-linear change after which T_0E = {y = v = 0} and
/// T_0M = {v = 0}, with the scaled defining function starting with -v.
inline LinearFrame align_linear_frame(const HypersurfaceModel& M, const FrameOptions& opt = {}) {
  M.validate();
  Coords c(M.n);
  const HypersurfaceModel T = detail::translated(M);
  const auto t = detail::edge_tangents(T.edge);
  const auto dr = detail::ambient_linear_coeffs(T.r);
  const QMatrix tmat = detail::columns(t);

  std::vector<std::vector<Scalar>> real_basis = t;
  for (const auto& tk : t) real_basis.push_back(c.J(tk));
  if (determinant(detail::columns(real_basis)) == 0)
    throw PreconditionError("edge is not maximally real at the base point: T_pE + J T_pE is a proper subspace");

  const std::size_t m = t.size();
  std::vector<Scalar> alpha(m);
  for (std::size_t k = 0; k < m; ++k) alpha[k] = dot(dr, c.J(t[k]));
  std::size_t pivot = m;
  for (std::size_t k = m; k-- > 0;)
    if (alpha[k] != 0) {
      pivot = k;
      break;
    }
  if (pivot == m) throw PreconditionError("J(T_pE) is tangent to M; the edge is not maximally real in M");

  auto ambient_of = [&](const std::vector<Scalar>& a) { return tmat * a; };
  std::vector<std::vector<Scalar>> vparams;  // basis of {a : dr(J t(a)) = 0}
  for (std::size_t j = 0; j < m; ++j) {
    if (j == pivot) continue;
    std::vector<Scalar> b(m, Scalar(0));
    b[j] = 1;
    b[pivot] = -alpha[j] / alpha[pivot];
    vparams.push_back(std::move(b));
  }

  std::vector<std::vector<Scalar>> pre;
  if (opt.axis) {
    const auto& sigma = *opt.axis;
    if (sigma.size() != c.dim()) throw PreconditionError("wedge axis must be an ambient vector");
    auto neg_j = c.J(sigma);
    for (auto& x : neg_j) x = -x;
    auto coeff = solve_exact(tmat, neg_j);
    if (!coeff) throw PreconditionError("wedge axis is not in J(T_pE)");
    if (dot(dr, sigma) != 0) throw PreconditionError("wedge axis is not tangent to M");
    bool zero = true;
    for (const auto& x : sigma)
      if (x != 0) zero = false;
    if (zero) throw PreconditionError("wedge axis is zero");
    pre.push_back(neg_j);
    std::size_t drop = vparams.size();
    for (std::size_t j = 0, i = 0; j < m; ++j) {
      if (j == pivot) continue;
      if ((*coeff)[j] != 0) {
        drop = i;
        break;
      }
      ++i;
    }
    for (std::size_t i = 0; i < vparams.size(); ++i)
      if (i != drop) pre.push_back(ambient_of(vparams[i]));
  } else {
    for (const auto& b : vparams) pre.push_back(ambient_of(b));
  }

  LinearFrame out;
  for (const auto& v : pre) {
    std::vector<Scalar> e = v;
    for (const auto& prev : out.basis) {
      const Scalar f = dot(v, prev) / dot(prev, prev);
      for (std::size_t i = 0; i < e.size(); ++i) e[i] -= f * prev[i];
    }
    out.basis.push_back(std::move(e));
  }

  std::vector<Scalar> last;
  if (opt.tau) {
    const auto& tau = *opt.tau;
    if (tau.size() != c.dim()) throw PreconditionError("tau must be an ambient vector");
    last = c.J(tau);
    for (auto& x : last) x = -x;
    if (!solve_exact(tmat, last)) throw PreconditionError("tau is not in J(T_pE)");
    const Scalar cval = dot(dr, tau);
    if (cval == 0) throw PreconditionError("tau is tangent to M (dr(tau) = 0)");
    if (cval < 0) {
      out.r_scale = 1 / abs(cval);
    } else {
      out.r_scale = -1 / cval;
      out.orientation_flipped = true;
    }
  } else {
    last = t[pivot];
    for (auto& x : last) x = -x / alpha[pivot];
  }
  out.basis.push_back(last);

  std::vector<std::vector<Scalar>> cols(c.dim());
  for (int k = 0; k <= M.n; ++k) {
    cols[c.re(k)] = out.basis[static_cast<std::size_t>(k)];
    cols[c.im(k)] = c.J(out.basis[static_cast<std::size_t>(k)]);
  }
  out.R = detail::columns(cols);
  if (determinant(out.R) == 0) throw NumericalError("frame matrix is singular");
  out.map = PolyMap::linear(c.ambient(), c.ambient(), out.R, M.cap);
  return out;
}

/// Quadratic data of a graph v = h(x, y, u): the y-y block, the x-y coupling
/// split into skew and symmetric parts, and the u-y coupling.
inline QuadraticData extract_quadratic_data(const TruncatedPoly& h) {
  const Vars& vars = h.vars();
  if (vars.size() < 3 || (vars.size() - 1) % 2 != 0 || vars.back() != "u")
    throw VariableMismatch("graph must be a polynomial in x1..xn, y1..yn, u", "");
  const int n = static_cast<int>((vars.size() - 1) / 2);
  Coords c(n);
  if (vars != c.graph()) throw VariableMismatch("graph must be a polynomial in x1..xn, y1..yn, u", "");
  if (h.order() < 2) throw PreconditionError("graph has a constant or linear part: " + h.degree_range(0, 1).str());

  QuadraticData q{QMatrix(n, n), QMatrix(n, n), QMatrix(n, n), std::vector<Scalar>(n, Scalar(0))};
  QMatrix P(n, n);
  auto is_y = [&](std::size_t i) { return i >= static_cast<std::size_t>(n) && i < static_cast<std::size_t>(2 * n); };
  const TruncatedPoly quad = h.homogeneous_part(2);
  for (const auto& [e, coef] : quad.terms()) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) idx.push_back(i);
    const std::size_t a = idx[0], b = idx[1];  // a <= b
    if (is_y(a) && is_y(b)) {
      const std::size_t i = a - n, j = b - n;
      if (i == j) {
        q.Lambda(i, i) = coef;
      } else {
        q.Lambda(i, j) = coef / 2;
        q.Lambda(j, i) = coef / 2;
      }
    } else if (a < static_cast<std::size_t>(n) && is_y(b)) {
      P(a, b - n) = coef;
    } else if (is_y(a) && b == c.u()) {
      q.mu[a - n] = 2 * coef;
    } else {
      throw PreconditionError("graph has quadratic terms in (x, u) alone (" + vars[a] + "*" + vars[b] +
                              "); the edge is not contained in M or the pipeline was misused");
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      q.Omega(i, j) = (P(i, j) - P(j, i)) / 2;
      q.Gamma(i, j) = (P(i, j) + P(j, i)) / 2;
    }
  return q;
}

/// Full normalization: translation, linear frame, osculating change, final
/// change removing the Gamma and mu terms.
inline NormalFormData normal_form(const HypersurfaceModel& M, const FrameOptions& opt = {}) {
  M.validate();
  Coords c(M.n);
  const int cap = M.cap;
  const Vars amb = c.ambient();
  const HypersurfaceModel T = detail::translated(M);

  NormalFormData nf;
  nf.n = M.n;
  nf.cap = cap;
  nf.translation = M.base_point();
  nf.frame = align_linear_frame(M, opt);

  // Frame coordinates.
  TruncatedPoly r1 = compose_truncated(T.r, nf.frame.map, cap) * nf.frame.r_scale;
  PolyMap rinv = PolyMap::linear(amb, amb, *inverse(nf.frame.R), cap);
  EdgeModel e1 = detail::regraph(compose_maps(rinv, T.edge.embedding(), cap), M.n, cap);

  // Osculating change z = z^ + iF(z^, w^), w = w^ + iG(z^, w^).
  auto zc = detail::complex_coordinates(c, cap);
  std::vector<ComplexPoly> dz;
  for (const auto& f : e1.f) dz.push_back(complexify(f.degree_range(2, 3), zc, amb, cap).times_i());
  ComplexPoly dw = complexify(e1.g.degree_range(2, 3), zc, amb, cap).times_i();
  nf.osculating = detail::holomorphic_shift(c, dz, dw, cap);
  TruncatedPoly r2 = compose_truncated(r1, nf.osculating, cap);
  PolyMap osc_inv = invert_map_truncated(nf.osculating, cap);
  EdgeModel e2 = detail::regraph(compose_maps(osc_inv, e1.embedding(), cap), M.n, cap);
  detail::require_osculating(e2, "the osculating change");

  TruncatedPoly h2 = graph_solve(r2, "v", cap);
  QuadraticData q2 = extract_quadratic_data(h2);
  nf.Gamma = q2.Gamma;
  nf.mu = q2.mu;

  // Final change w = w^ + (z^t Gamma z + w z^t mu) / 2, z unchanged.
  ComplexPoly quad(amb, cap), lin(amb, cap);
  for (int a = 0; a < M.n; ++a) {
    lin += zc[static_cast<std::size_t>(a)] * q2.mu[static_cast<std::size_t>(a)];
    for (int b = 0; b < M.n; ++b)
      quad += zc[static_cast<std::size_t>(a)] * zc[static_cast<std::size_t>(b)] * q2.Gamma(a, b);
  }
  ComplexPoly dw_final = (quad + zc.back() * lin) * Scalar(1, 2);
  std::vector<ComplexPoly> no_dz(static_cast<std::size_t>(M.n), ComplexPoly(amb, cap));
  nf.final_change = detail::holomorphic_shift(c, no_dz, dw_final, cap);
  nf.r = compose_truncated(r2, nf.final_change, cap);
  PolyMap fin_inv = invert_map_truncated(nf.final_change, cap);
  nf.edge = detail::regraph(compose_maps(fin_inv, e2.embedding(), cap), M.n, cap);
  detail::require_osculating(nf.edge, "the final change");

  nf.h = graph_solve(nf.r, "v", cap);
  QuadraticData q3 = extract_quadratic_data(nf.h);
  for (int a = 0; a < M.n; ++a) {
    if (q3.mu[static_cast<std::size_t>(a)] != 0) throw NumericalError("final change left a u*y term");
    for (int b = 0; b < M.n; ++b)
      if (q3.Gamma(a, b) != 0) throw NumericalError("final change left a symmetric x*y term");
  }
  nf.Lambda = q3.Lambda;
  nf.Omega = q3.Omega;

  nf.chain = compose_maps(nf.frame.map, compose_maps(nf.osculating, nf.final_change, cap), cap);
  nf.chain_inverse = compose_maps(fin_inv, compose_maps(osc_inv, rinv, cap), cap);
  return nf;
}

/// Input-model coordinates of a point given in normal coordinates (truncated chain).
inline std::vector<Scalar> to_input_coordinates(const NormalFormData& nf, const std::vector<Scalar>& p) {
  std::vector<Scalar> out;
  for (std::size_t i = 0; i < nf.chain.components.size(); ++i)
    out.push_back(eval_poly(nf.chain.components[i], p) + nf.translation[i]);
  return out;
}

}  // namespace eow

#endif  // EOW_NORMAL_FORM_PIPELINE_HPP
