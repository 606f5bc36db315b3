#ifndef EOW_SERIES_TRUNCATED_POLY_HPP
#define EOW_SERIES_TRUNCATED_POLY_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eow/error.hpp"
#include "eow/series/scalar.hpp"

namespace eow {

using Vars = std::vector<std::string>;
using Exponent = std::vector<std::uint8_t>;

inline int total_degree(const Exponent& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

/// Total degree first, then lexicographic with larger leading exponents first
/// (x^2 < x*y < y^2 in two variables).
struct GradedLex {
  bool operator()(const Exponent& a, const Exponent& b) const {
    const int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  }
};

/// Sparse multivariate polynomial with exact coefficients and a degree cap.
/// Terms above the cap are discarded on insertion; zero coefficients are never
/// stored, so equality of canonical forms is plain map equality.
class TruncatedPoly {
 public:
  using TermMap = std::map<Exponent, Scalar, GradedLex>;

  TruncatedPoly() = default;
  TruncatedPoly(Vars vars, int cap) : vars_(std::move(vars)), cap_(cap) {
    if (cap_ < 0) throw PreconditionError("degree cap must be nonnegative");
  }

  static TruncatedPoly constant(Vars vars, int cap, const Scalar& c) {
    TruncatedPoly p(std::move(vars), cap);
    p.add_term(Exponent(p.vars_.size(), 0), c);
    return p;
  }

  static TruncatedPoly variable(Vars vars, int cap, std::string_view name) {
    TruncatedPoly p(std::move(vars), cap);
    Exponent e(p.vars_.size(), 0);
    e[p.var_index(name)] = 1;
    p.add_term(std::move(e), Scalar(1));
    return p;
  }

  static TruncatedPoly monomial(Vars vars, int cap, Exponent e, const Scalar& c) {
    TruncatedPoly p(std::move(vars), cap);
    if (e.size() != p.vars_.size())
      throw PreconditionError("exponent length does not match variable count");
    p.add_term(std::move(e), c);
    return p;
  }

  const Vars& vars() const noexcept { return vars_; }
  std::size_t nvars() const noexcept { return vars_.size(); }
  int cap() const noexcept { return cap_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  std::size_t var_index(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return i;
    throw VariableMismatch("variable '" + std::string(name) + "' not in polynomial's variable list",
                           std::string(name));
  }

  bool has_var(std::string_view name) const {
    return std::find(vars_.begin(), vars_.end(), name) != vars_.end();
  }

  void add_term(Exponent e, const Scalar& c) {
    if (c == 0 || total_degree(e) > cap_) return;
    auto [it, inserted] = terms_.try_emplace(std::move(e), c);
    if (inserted) {
      it->second.canonicalize();
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Scalar coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  /// Coefficient addressed by variable names, e.g. {{"y1", 1}, {"u", 1}}.
  Scalar coefficient(std::initializer_list<std::pair<std::string_view, int>> powers) const {
    Exponent e(vars_.size(), 0);
    for (auto [name, k] : powers) e[var_index(name)] = static_cast<std::uint8_t>(k);
    return coefficient(e);
  }

  Scalar constant_term() const { return coefficient(Exponent(vars_.size(), 0)); }

  /// Highest total degree present, -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : total_degree(terms_.rbegin()->first); }

  /// Lowest total degree present; max int for the zero polynomial.
  int order() const {
    return terms_.empty() ? std::numeric_limits<int>::max() : total_degree(terms_.begin()->first);
  }

  TruncatedPoly homogeneous_part(int d) const {
    TruncatedPoly r(vars_, cap_);
    for (const auto& [e, c] : terms_)
      if (total_degree(e) == d) r.terms_.emplace(e, c);
    return r;
  }

  /// Terms with lo <= degree <= hi.
  TruncatedPoly degree_range(int lo, int hi) const {
    TruncatedPoly r(vars_, cap_);
    for (const auto& [e, c] : terms_) {
      int d = total_degree(e);
      if (d >= lo && d <= hi) r.terms_.emplace(e, c);
    }
    return r;
  }

  TruncatedPoly with_cap(int cap) const {
    TruncatedPoly r(vars_, cap);
    for (const auto& [e, c] : terms_) r.add_term(e, c);
    return r;
  }

  TruncatedPoly derivative(std::size_t var) const {
    TruncatedPoly r(vars_, cap_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponent f = e;
      --f[var];
      r.add_term(std::move(f), c * e[var]);
    }
    return r;
  }

  TruncatedPoly derivative(std::string_view name) const { return derivative(var_index(name)); }

  TruncatedPoly& operator+=(const TruncatedPoly& o) {
    require_same_vars(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  TruncatedPoly& operator-=(const TruncatedPoly& o) {
    require_same_vars(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  TruncatedPoly& operator*=(const Scalar& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend TruncatedPoly operator+(TruncatedPoly a, const TruncatedPoly& b) { return a += b; }
  friend TruncatedPoly operator-(TruncatedPoly a, const TruncatedPoly& b) { return a -= b; }
  friend TruncatedPoly operator*(TruncatedPoly a, const Scalar& s) { return a *= s; }
  friend TruncatedPoly operator*(const Scalar& s, TruncatedPoly a) { return a *= s; }
  friend TruncatedPoly operator-(TruncatedPoly a) { return a *= Scalar(-1); }

  /// Product truncated at the smaller of the two caps.
  friend TruncatedPoly operator*(const TruncatedPoly& a, const TruncatedPoly& b) {
    a.require_same_vars(b);
    const int cap = std::min(a.cap_, b.cap_);
    TruncatedPoly r(a.vars_, cap);
    const std::size_t nv = a.vars_.size();
    Exponent e(nv);
    for (const auto& [ea, ca] : a.terms_) {
      const int da = total_degree(ea);
      if (da > cap) break;
      for (const auto& [eb, cb] : b.terms_) {
        if (da + total_degree(eb) > cap) break;
        for (std::size_t i = 0; i < nv; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
        r.add_term(e, ca * cb);
      }
    }
    return r;
  }

  friend bool operator==(const TruncatedPoly& a, const TruncatedPoly& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

  /// Human-readable form, e.g. "y1^2 - y2^2 + 1/3*x1*u".
  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      Scalar mag = abs(c);
      if (first) {
        if (c < 0) os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      first = false;
      bool constant = total_degree(e) == 0;
      if (mag != 1 || constant) {
        os << to_string(mag);
        if (!constant) os << "*";
      }
      bool firstvar = true;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!firstvar) os << "*";
        firstvar = false;
        os << vars_[i];
        if (e[i] > 1) os << "^" << int(e[i]);
      }
    }
    return os.str();
  }

  void require_same_vars(const TruncatedPoly& o) const {
    if (vars_ == o.vars_) return;
    for (const auto& v : o.vars_)
      if (!has_var(v)) throw VariableMismatch("operand variable '" + v + "' missing", v);
    for (const auto& v : vars_)
      if (!o.has_var(v)) throw VariableMismatch("operand variable '" + v + "' missing", v);
    throw VariableMismatch("operand variable lists differ in order", vars_.empty() ? "" : vars_[0]);
  }

 private:
  Vars vars_;
  int cap_ = 0;
  TermMap terms_;
};

inline std::ostream& operator<<(std::ostream& os, const TruncatedPoly& p) { return os << p.str(); }

/// Re-expresses p over a superset/reordering of its variables.
inline TruncatedPoly embed_vars(const TruncatedPoly& p, const Vars& vars) {
  std::vector<std::size_t> where(p.nvars());
  for (std::size_t i = 0; i < p.nvars(); ++i) {
    auto it = std::find(vars.begin(), vars.end(), p.vars()[i]);
    if (it == vars.end())
      throw VariableMismatch("variable '" + p.vars()[i] + "' absent from target list", p.vars()[i]);
    where[i] = static_cast<std::size_t>(it - vars.begin());
  }
  TruncatedPoly r(vars, p.cap());
  for (const auto& [e, c] : p.terms()) {
    Exponent f(vars.size(), 0);
    for (std::size_t i = 0; i < e.size(); ++i) f[where[i]] = e[i];
    r.add_term(std::move(f), c);
  }
  return r;
}

}  // namespace eow

#endif  // EOW_SERIES_TRUNCATED_POLY_HPP
