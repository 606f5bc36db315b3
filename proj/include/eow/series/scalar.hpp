#ifndef EOW_SERIES_SCALAR_HPP
#define EOW_SERIES_SCALAR_HPP

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "eow/error.hpp"

namespace eow {

/// Exact rational; GMP keeps it canonical (positive denominator, reduced).
using Scalar = mpq_class;

inline double to_double(const Scalar& s) { return s.get_d(); }

/// Canonical a/b (the two-argument mpq constructor does not reduce).
inline Scalar ratio(long a, long b) {
  Scalar q(a, b);
  q.canonicalize();
  return q;
}

/// "p" for integers, "p/q" otherwise.
inline std::string to_string(const Scalar& s) { return s.get_str(); }

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

}  // namespace detail

/// Parses "p/q", integers, and decimals with optional exponent ("0.5", "-1.25e-3")
/// exactly.
inline Scalar parse_scalar(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) throw ParseError("empty scalar literal");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    std::string_view num_digits = num;
    if (!num_digits.empty() && (num_digits.front() == '-' || num_digits.front() == '+'))
      num_digits.remove_prefix(1);
    if (!detail::all_digits(num_digits) || !detail::all_digits(den))
      throw ParseError("malformed rational literal '" + std::string(text) + "'");
    mpz_class n(std::string(num.front() == '+' ? num.substr(1) : num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    Scalar q(n, d);
    q.canonicalize();
    return q;
  }

  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view ex = s.substr(e + 1);
    bool eneg = false;
    if (!ex.empty() && (ex.front() == '-' || ex.front() == '+')) {
      eneg = ex.front() == '-';
      ex.remove_prefix(1);
    }
    if (!detail::all_digits(ex) || ex.size() > 6)
      throw ParseError("malformed exponent in '" + std::string(text) + "'");
    exponent = std::stol(std::string(ex));
    if (eneg) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string_view ip = s, fp;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    ip = s.substr(0, dot);
    fp = s.substr(dot + 1);
  }
  if ((ip.empty() && fp.empty()) || (!ip.empty() && !detail::all_digits(ip)) ||
      (!fp.empty() && !detail::all_digits(fp)))
    throw ParseError("malformed numeric literal '" + std::string(text) + "'");

  mpz_class mantissa(std::string(ip.empty() ? "0" : ip) + std::string(fp), 10);
  long scale = static_cast<long>(fp.size()) - exponent;
  Scalar q;
  if (scale >= 0) {
    q = Scalar(mantissa, detail::pow10(static_cast<unsigned long>(scale)));
  } else {
    q = Scalar(mantissa * detail::pow10(static_cast<unsigned long>(-scale)));
  }
  q.canonicalize();
  return negative ? Scalar(-q) : q;
}

/// Best rational approximation with denominator <= max_den (continued
/// fractions), stopping once within rel_tol of x.
inline Scalar rationalize(double x, double rel_tol = 1e-13, std::int64_t max_den = 1 << 24) {
  if (!std::isfinite(x)) throw PreconditionError("cannot rationalize a non-finite value");
  if (x == 0.0) return Scalar(0);
  const Scalar exact(x);
  Scalar target = abs(exact);
  mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  Scalar rest = target;
  Scalar best = exact;
  for (int iter = 0; iter < 64; ++iter) {
    mpz_class a = rest.get_num() / rest.get_den();
    mpz_class h2 = a * h1 + h0;
    mpz_class k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    Scalar approx(h1, k1);
    approx.canonicalize();
    best = approx;
    Scalar err = abs(approx - target);
    if (err <= Scalar(rel_tol) * target) break;
    Scalar frac = rest - Scalar(a);
    if (frac == 0) break;
    rest = 1 / frac;
  }
  return x < 0 ? Scalar(-best) : best;
}

}  // namespace eow

#endif  // EOW_SERIES_SCALAR_HPP
