#ifndef EOW_SERIES_POLY_MAP_HPP
#define EOW_SERIES_POLY_MAP_HPP

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "eow/error.hpp"
#include "eow/series/matrix.hpp"
#include "eow/series/truncated_poly.hpp"

namespace eow {

/// Polynomial map expressing each target coordinate as a polynomial in the
/// source coordinates: target_k = components[k](source).
struct PolyMap {
  Vars source;
  Vars target;
  std::vector<TruncatedPoly> components;

  std::size_t dim_source() const noexcept { return source.size(); }
  std::size_t dim_target() const noexcept { return target.size(); }

  static PolyMap identity(const Vars& vars, int cap) {
    PolyMap m{vars, vars, {}};
    for (const auto& v : vars) m.components.push_back(TruncatedPoly::variable(vars, cap, v));
    return m;
  }

  /// target = A * source with A given as target x source matrix.
  static PolyMap linear(const Vars& source, const Vars& target, const QMatrix& a, int cap) {
    if (a.rows() != target.size() || a.cols() != source.size())
      throw PreconditionError("linear map matrix has wrong shape");
    PolyMap m{source, target, {}};
    for (std::size_t r = 0; r < target.size(); ++r) {
      TruncatedPoly p(source, cap);
      for (std::size_t c = 0; c < source.size(); ++c) {
        Exponent e(source.size(), 0);
        e[c] = 1;
        p.add_term(std::move(e), a(r, c));
      }
      m.components.push_back(std::move(p));
    }
    return m;
  }

  void validate() const {
    if (components.size() != target.size())
      throw PreconditionError("polymap component count differs from target dimension");
    for (const auto& c : components)
      if (c.vars() != source) throw VariableMismatch("polymap component over wrong variables", "");
  }

  /// Degree-one coefficients as a target x source matrix.
  QMatrix linear_part() const {
    QMatrix a(target.size(), source.size());
    for (std::size_t r = 0; r < components.size(); ++r)
      for (std::size_t c = 0; c < source.size(); ++c) {
        Exponent e(source.size(), 0);
        e[c] = 1;
        a(r, c) = components[r].coefficient(e);
      }
    return a;
  }

  std::vector<Scalar> constant_part() const {
    std::vector<Scalar> v;
    for (const auto& c : components) v.push_back(c.constant_term());
    return v;
  }

  friend bool operator==(const PolyMap& a, const PolyMap& b) {
    return a.source == b.source && a.target == b.target && a.components == b.components;
  }
};

/// Evaluates p at ring-valued arguments (one per variable of p), caching the
/// monomial products so each term costs a single ring multiplication.
template <class Ring, class FromScalar>
Ring evaluate_in(const TruncatedPoly& p, std::span<const Ring> args, const Ring& one,
                 FromScalar&& from_scalar) {
  if (args.size() != p.nvars())
    throw PreconditionError("argument count " + std::to_string(args.size()) +
                            " differs from variable count " + std::to_string(p.nvars()));
  std::map<Exponent, Ring, GradedLex> cache;
  const Exponent zero(p.nvars(), 0);
  cache.emplace(zero, one);
  auto power = [&](auto&& self, const Exponent& e) -> const Ring& {
    auto it = cache.find(e);
    if (it != cache.end()) return it->second;
    std::size_t k = e.size();
    while (k > 0 && e[k - 1] == 0) --k;
    Exponent prev = e;
    --prev[k - 1];
    Ring value = self(self, prev) * args[k - 1];
    return cache.emplace(e, std::move(value)).first->second;
  };
  Ring acc = one * from_scalar(Scalar(0));
  for (const auto& [e, c] : p.terms()) acc = acc + power(power, e) * from_scalar(c);
  return acc;
}

/// Substitution of a fixed map into many polynomials, sharing the cache of
/// monomial powers of the map's components.
class Composer {
 public:
  Composer(const PolyMap& m, int cap) : source_(m.source), target_(m.target), cap_(cap) {
    m.validate();
    for (const auto& c : m.components) {
      args_.push_back(c.with_cap(cap));
      if (c.constant_term() != 0) no_constant_ = false;
    }
    cache_.emplace(Exponent(target_.size(), 0), TruncatedPoly::constant(source_, cap, 1));
  }

  /// p ∘ m truncated at the cap; p is a polynomial in m's target variables.
  TruncatedPoly operator()(const TruncatedPoly& p) {
    if (p.vars() != target_) return reordered(p);
    TruncatedPoly acc(source_, cap_);
    for (const auto& [e, c] : p.terms()) {
      if (no_constant_ && total_degree(e) > cap_) continue;
      acc += power(e) * c;
    }
    return acc;
  }

 private:
  const TruncatedPoly& power(const Exponent& e) {
    auto it = cache_.find(e);
    if (it != cache_.end()) return it->second;
    std::size_t k = e.size();
    while (k > 0 && e[k - 1] == 0) --k;
    Exponent prev = e;
    --prev[k - 1];
    TruncatedPoly value = power(prev) * args_[k - 1];
    return cache_.emplace(e, std::move(value)).first->second;
  }

  TruncatedPoly reordered(const TruncatedPoly& p) {
    for (const auto& v : p.vars())
      if (std::find(target_.begin(), target_.end(), v) == target_.end())
        throw VariableMismatch("polynomial variable '" + v + "' is not a target of the map", v);
    std::vector<std::size_t> where;
    for (const auto& v : p.vars())
      where.push_back(static_cast<std::size_t>(std::find(target_.begin(), target_.end(), v) - target_.begin()));
    TruncatedPoly acc(source_, cap_);
    Exponent full(target_.size(), 0);
    for (const auto& [e, c] : p.terms()) {
      std::fill(full.begin(), full.end(), 0);
      for (std::size_t i = 0; i < e.size(); ++i) full[where[i]] = e[i];
      if (no_constant_ && total_degree(full) > cap_) continue;
      acc += power(full) * c;
    }
    return acc;
  }

  Vars source_, target_;
  int cap_;
  bool no_constant_ = true;
  std::vector<TruncatedPoly> args_;
  std::map<Exponent, TruncatedPoly, GradedLex> cache_;
};

/// p ∘ m truncated at degree cap: p is a polynomial in m's target variables and
/// the result lives in m's source variables.
inline TruncatedPoly compose_truncated(const TruncatedPoly& p, const PolyMap& m, int cap) {
  return Composer(m, cap)(p);
}

/// outer ∘ inner: outer.source must equal inner.target.
inline PolyMap compose_maps(const PolyMap& outer, const PolyMap& inner, int cap) {
  if (outer.source != inner.target)
    throw VariableMismatch("map composition: inner targets do not match outer sources",
                           outer.source.empty() ? "" : outer.source[0]);
  PolyMap r{inner.source, outer.target, {}};
  Composer comp(inner, cap);
  for (const auto& c : outer.components) r.components.push_back(comp(c));
  return r;
}

/// Formal inverse of a map with zero constant term and invertible linear part:
/// the result maps m's targets back to m's sources, and
/// compose_maps(result, m) is the identity modulo degree cap+1.
inline PolyMap invert_map_truncated(const PolyMap& m, int cap) {
  m.validate();
  if (m.dim_source() != m.dim_target())
    throw PreconditionError("cannot invert a map between spaces of different dimension");
  for (std::size_t k = 0; k < m.components.size(); ++k)
    if (m.components[k].constant_term() != 0)
      throw PreconditionError("map component '" + m.target[k] + "' has a nonzero constant term");
  QMatrix lin = m.linear_part();
  auto linv = inverse(lin);
  if (!linv) throw SingularLinearPart("linear part of map is singular", to_string(determinant(lin)));

  // m(s) = L s + N(s); the inverse g solves g = L^{-1} (T - N(g)).
  std::vector<TruncatedPoly> nonlinear;
  for (const auto& c : m.components) nonlinear.push_back(c.degree_range(2, cap));

  // Each pass fixes one more degree, so pass d only needs truncation at d.
  const PolyMap base = PolyMap::linear(m.target, m.source, *linv, cap);
  PolyMap g = base;
  for (int d = 2; d <= cap; ++d) {
    Composer comp(g, d);
    PolyMap next = base;
    for (std::size_t k = 0; k < nonlinear.size(); ++k) {
      const TruncatedPoly nk = comp(nonlinear[k].with_cap(d)).with_cap(cap);
      for (std::size_t i = 0; i < next.components.size(); ++i)
        if ((*linv)(i, k) != 0) next.components[i] -= nk * (*linv)(i, k);
    }
    g = std::move(next);
  }
  return g;
}

/// Map that substitutes `value` for `solve_var` and keeps the remaining variables.
inline PolyMap substitution_map(const Vars& vars, std::string_view solve_var, const TruncatedPoly& value) {
  Vars rest;
  for (const auto& v : vars)
    if (v != solve_var) rest.push_back(v);
  if (value.vars() != rest) throw VariableMismatch("substituted value must be over remaining variables", "");
  PolyMap m{rest, vars, {}};
  for (const auto& v : vars)
    m.components.push_back(v == solve_var ? value : TruncatedPoly::variable(rest, value.cap(), v));
  return m;
}

/// Solves r(..., solve_var = h(rest)) = 0 for h as a truncated series by
/// Newton iteration (correct order doubles each step).
inline TruncatedPoly graph_solve(const TruncatedPoly& r, std::string_view solve_var, int cap) {
  const std::size_t vi = r.var_index(solve_var);
  if (r.constant_term() != 0) throw PreconditionError("graph_solve: defining polynomial has a nonzero constant term");
  Exponent ev(r.nvars(), 0);
  ev[vi] = 1;
  const Scalar slope = r.coefficient(ev);
  if (slope == 0)
    throw PreconditionError("graph_solve: derivative in '" + std::string(solve_var) + "' vanishes at the origin");
  Vars rest;
  for (const auto& v : r.vars())
    if (v != solve_var) rest.push_back(v);
  // r = sum_k a_k(rest) * var^k
  std::vector<TruncatedPoly> a;
  for (const auto& [e, c] : r.terms()) {
    const std::size_t k = e[vi];
    while (a.size() <= k) a.emplace_back(rest, cap);
    Exponent er;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (i != vi) er.push_back(e[i]);
    a[k].add_term(std::move(er), c);
  }

  TruncatedPoly h(rest, cap);
  const TruncatedPoly one = TruncatedPoly::constant(rest, cap, 1);
  for (int iter = 0; iter < 2 * cap + 4; ++iter) {
    // Horner for r(h) and r'(h) together.
    TruncatedPoly value = a.back(), deriv(rest, cap);
    for (std::size_t k = a.size() - 1; k-- > 0;) {
      deriv = deriv * h + value;
      value = value * h + a[k];
    }
    if (value.is_zero()) return h;
    // 1/deriv = (1/c) sum_j (-(deriv - c)/c)^j
    const Scalar c = deriv.constant_term();
    TruncatedPoly e = (deriv - TruncatedPoly::constant(rest, cap, c)) * Scalar(-1 / c);
    TruncatedPoly inv = one, term = one;
    for (int j = 1; j <= cap; ++j) {
      term = term * e;
      if (term.is_zero()) break;
      inv += term;
    }
    inv *= Scalar(1 / c);
    h -= value * inv;
  }
  throw NumericalError("graph_solve did not reach a zero residual");
}

/// Exact value at a rational point.
inline Scalar eval_poly(const TruncatedPoly& p, std::span<const Scalar> point) {
  if (point.size() != p.nvars())
    throw PreconditionError("point has dimension " + std::to_string(point.size()) + ", expected " +
                            std::to_string(p.nvars()));
  return evaluate_in<Scalar>(p, point, Scalar(1), [](const Scalar& c) { return c; });
}

/// Float view of a polynomial for repeated evaluation in sampling loops.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const TruncatedPoly& p) : nvars_(p.nvars()), maxdeg_(std::max(p.degree(), 0)) {
    for (const auto& [e, c] : p.terms()) {
      exps_.push_back(e);
      coeffs_.push_back(to_double(c));
    }
  }

  std::size_t nvars() const noexcept { return nvars_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }

  template <class T>
  T operator()(std::span<const T> x) const {
    if (x.size() != nvars_)
      throw PreconditionError("point has dimension " + std::to_string(x.size()) + ", expected " +
                              std::to_string(nvars_));
    // powers[i * (maxdeg+1) + k] = x_i^k
    const std::size_t stride = static_cast<std::size_t>(maxdeg_) + 1;
    std::vector<T> powers(nvars_ * stride, T(1));
    for (std::size_t i = 0; i < nvars_; ++i)
      for (std::size_t k = 1; k < stride; ++k) powers[i * stride + k] = powers[i * stride + k - 1] * x[i];
    T acc(0);
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
      T term(coeffs_[t]);
      const Exponent& e = exps_[t];
      for (std::size_t i = 0; i < nvars_; ++i)
        if (e[i]) term *= powers[i * stride + e[i]];
      acc += term;
    }
    return acc;
  }

  template <class T>
  T operator()(std::initializer_list<T> x) const {
    return (*this)(std::span<const T>(x.begin(), x.size()));
  }

  template <class T>
  T operator()(const std::vector<T>& x) const {
    return (*this)(std::span<const T>(x));
  }

 private:
  std::size_t nvars_ = 0;
  int maxdeg_ = 0;
  std::vector<Exponent> exps_;
  std::vector<double> coeffs_;
};

/// Float value; monomials are accumulated from cached powers.
inline double eval_poly(const TruncatedPoly& p, std::span<const double> point) {
  return CompiledPoly(p)(point);
}

}  // namespace eow

#endif  // EOW_SERIES_POLY_MAP_HPP
