#ifndef EOW_SERIES_COMPLEX_POLY_HPP
#define EOW_SERIES_COMPLEX_POLY_HPP

#include <string>
#include <vector>

#include "eow/series/poly_map.hpp"

namespace eow {

/// Complex-valued polynomial in real variables, stored as real and imaginary
/// parts over a common variable list.
struct ComplexPoly {
  TruncatedPoly re, im;

  ComplexPoly() = default;
  ComplexPoly(TruncatedPoly r, TruncatedPoly i) : re(std::move(r)), im(std::move(i)) {}
  ComplexPoly(const Vars& vars, int cap) : re(vars, cap), im(vars, cap) {}

  static ComplexPoly constant(const Vars& vars, int cap, const Scalar& a, const Scalar& b = 0) {
    return {TruncatedPoly::constant(vars, cap, a), TruncatedPoly::constant(vars, cap, b)};
  }

  ComplexPoly& operator+=(const ComplexPoly& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  ComplexPoly& operator-=(const ComplexPoly& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend ComplexPoly operator+(ComplexPoly a, const ComplexPoly& b) { return a += b; }
  friend ComplexPoly operator-(ComplexPoly a, const ComplexPoly& b) { return a -= b; }
  friend ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ComplexPoly operator*(const ComplexPoly& a, const Scalar& s) { return {a.re * s, a.im * s}; }

  /// Multiplication by i.
  ComplexPoly times_i() const { return {-im, re}; }
  ComplexPoly conj() const { return {re, -im}; }

  friend bool operator==(const ComplexPoly& a, const ComplexPoly& b) { return a.re == b.re && a.im == b.im; }
};

/// Holomorphic extension of a real polynomial: each variable named in
/// `real_vars` is replaced by the complex coordinate `args[k]`.
inline ComplexPoly complexify(const TruncatedPoly& p, const std::vector<ComplexPoly>& args, const Vars& vars,
                              int cap) {
  if (args.size() != p.nvars()) throw PreconditionError("complexify: argument count mismatch");
  return evaluate_in<ComplexPoly>(p, std::span<const ComplexPoly>(args), ComplexPoly::constant(vars, cap, 1),
                                  [&](const Scalar& c) { return ComplexPoly::constant(vars, cap, c); });
}

}  // namespace eow

#endif  // EOW_SERIES_COMPLEX_POLY_HPP
