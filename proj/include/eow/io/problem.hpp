#ifndef EOW_IO_PROBLEM_HPP
#define EOW_IO_PROBLEM_HPP

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "eow/geometry/wedge.hpp"
#include "eow/io/format.hpp"
#include "eow/normal_form/model.hpp"

namespace eow::io {

/// Polynomial literal: list of term strings such as "-1/2*x1^2*y1", "u", "3".
inline TruncatedPoly parse_terms(const json& j, const Vars& vars, int cap, const std::string& where) {
  TruncatedPoly p(vars, cap);
  if (j.is_null()) return p;
  if (!j.is_array()) throw ParseError(where + ": polynomial must be an array of term strings");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string loc = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_string()) throw ParseError(loc + ": term must be a string");
    const std::string term = j[i].get<std::string>();
    std::string s;
    for (char ch : term)
      if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw ParseError(loc + ": empty term");
    Scalar coef = 1;
    std::size_t pos = 0;
    if (s[0] == '+' || s[0] == '-') {
      if (s[0] == '-') coef = -1;
      pos = 1;
    }
    std::vector<std::string> factors;
    for (std::size_t a = pos;;) {
      const std::size_t b = s.find('*', a);
      factors.push_back(s.substr(a, b == std::string::npos ? std::string::npos : b - a));
      if (b == std::string::npos) break;
      a = b + 1;
    }
    Exponent e(vars.size(), 0);
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const std::string& fac = factors[f];
      if (fac.empty()) throw ParseError(loc + ": malformed term '" + term + "'");
      if (std::isdigit(static_cast<unsigned char>(fac[0])) || fac[0] == '.') {
        if (f != 0) throw ParseError(loc + ": coefficient must lead the term '" + term + "'");
        try {
          coef *= parse_scalar(fac);
        } catch (const ParseError& err) {
          throw ParseError(loc + ": bad coefficient in '" + term + "': " + err.what());
        }
        continue;
      }
      const std::size_t caret = fac.find('^');
      const std::string name = fac.substr(0, caret);
      int power = 1;
      if (caret != std::string::npos) {
        const std::string ps = fac.substr(caret + 1);
        if (ps.empty() || ps.size() > 3 || !std::all_of(ps.begin(), ps.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
          throw ParseError(loc + ": bad exponent in '" + term + "'");
        power = std::stoi(ps);
      }
      const auto it = std::find(vars.begin(), vars.end(), name);
      if (it == vars.end()) {
        std::string list;
        for (const auto& v : vars) list += (list.empty() ? "" : ", ") + v;
        throw ParseError(loc + ": unknown variable '" + name + "' in '" + term + "' (expected one of " + list + ")");
      }
      const auto k = static_cast<std::size_t>(it - vars.begin());
      if (e[k] + power > 255) throw ParseError(loc + ": exponent too large in '" + term + "'");
      e[k] = static_cast<std::uint8_t>(e[k] + power);
    }
    p += TruncatedPoly::monomial(vars, cap, e, coef);
  }
  return p;
}

/// Term strings in graded-lex order.
inline json emit_terms(const TruncatedPoly& p) {
  json a = json::array();
  const auto& vars = p.vars();
  for (const auto& [e, c] : p.terms()) {
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += vars[i];
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    std::string s;
    if (mono.empty()) {
      s = c.get_str();
    } else if (c == 1) {
      s = mono;
    } else if (c == -1) {
      s = "-" + mono;
    } else {
      s = c.get_str() + "*" + mono;
    }
    a.push_back(s);
  }
  return a;
}

inline Scalar parse_rational(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Scalar(j.get<long>());
  if (j.is_string()) {
    try {
      return parse_scalar(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  throw ParseError(where + ": exact value must be an integer or a rational string such as \"1/2\"");
}

inline double parse_real(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return parse_scalar(j.get<std::string>()).get_d();
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  throw ParseError(where + ": expected a number");
}

struct Problem {
  int n = 2;
  int degree_cap = 6;
  std::string hypersurface_kind = "graph_v";  // or defining_r
  TruncatedPoly hypersurface;
  HypersurfaceModel model;
  std::optional<WedgeSpec> wedge;
  json wedge_axis;  // canonical axis literal
  json config = json::object();
};

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : keys)
      if (it.key() == k) ok = true;
    if (!ok) throw ParseError(where + ": unknown field '" + it.key() + "'");
  }
}

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

/// Parses and validates a problem document; every diagnostic names its field.
inline Problem parse_problem(const json& j, std::optional<int> cap_override = std::nullopt) {
  if (!j.is_object()) throw ParseError("problem: top level must be an object");
  detail::reject_unknown(j, {"n", "degree_cap", "hypersurface", "edge", "base_point", "wedge", "config"}, "problem");
  Problem P;
  const json& jn = detail::field(j, "n", "problem");
  if (!jn.is_number_integer()) throw ParseError("n: expected an integer");
  P.n = jn.get<int>();
  if (P.n < 1 || P.n > 8) throw ParseError("n: must lie in 1..8");
  if (j.contains("degree_cap")) {
    if (!j["degree_cap"].is_number_integer()) throw ParseError("degree_cap: expected an integer");
    P.degree_cap = j["degree_cap"].get<int>();
  }
  if (cap_override) P.degree_cap = *cap_override;
  if (P.degree_cap < 4 || P.degree_cap > 24) throw ParseError("degree_cap: must lie in 4..24");
  const int cap = P.degree_cap;
  Coords c(P.n);

  const json& jh = detail::field(j, "hypersurface", "problem");
  if (!jh.is_object() || jh.size() != 1 || !(jh.contains("graph_v") || jh.contains("defining_r")))
    throw ParseError("hypersurface: expected exactly one of 'graph_v' or 'defining_r'");
  P.hypersurface_kind = jh.contains("graph_v") ? "graph_v" : "defining_r";
  P.hypersurface = parse_terms(jh.begin().value(), P.hypersurface_kind == "graph_v" ? c.graph() : c.ambient(), cap,
                               "hypersurface." + P.hypersurface_kind);

  EdgeModel edge = EdgeModel::flat(P.n, cap);
  if (j.contains("edge")) {
    const json& je = j["edge"];
    if (!je.is_object()) throw ParseError("edge: expected an object");
    detail::reject_unknown(je, {"graph_y", "graph_v"}, "edge");
    if (je.contains("graph_y")) {
      const json& gy = je["graph_y"];
      if (!gy.is_array() || gy.size() != static_cast<std::size_t>(P.n))
        throw ParseError("edge.graph_y: expected " + std::to_string(P.n) + " polynomials");
      for (int k = 0; k < P.n; ++k)
        edge.f[static_cast<std::size_t>(k)] =
            parse_terms(gy[static_cast<std::size_t>(k)], c.edge(), cap, "edge.graph_y[" + std::to_string(k) + "]");
    }
    if (je.contains("graph_v")) edge.g = parse_terms(je["graph_v"], c.edge(), cap, "edge.graph_v");
  }

  std::vector<Scalar> base(static_cast<std::size_t>(P.n + 1), Scalar(0));
  if (j.contains("base_point")) {
    const json& jb = j["base_point"];
    if (!jb.is_array() || jb.size() != base.size())
      throw ParseError("base_point: expected " + std::to_string(base.size()) + " edge parameters (x1..xn, u)");
    for (std::size_t i = 0; i < base.size(); ++i)
      base[i] = parse_rational(jb[i], "base_point[" + std::to_string(i) + "]");
  }

  try {
    if (P.hypersurface_kind == "graph_v") {
      P.model = HypersurfaceModel::from_graph(P.hypersurface, edge, base);
    } else {
      P.model.n = P.n;
      P.model.cap = cap;
      P.model.r = P.hypersurface;
      P.model.edge = edge;
      P.model.base = base;
    }
    P.model.validate();
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("hypersurface: ") + e.what());
  }

  if (j.contains("wedge")) {
    const json& jw = j["wedge"];
    if (!jw.is_object()) throw ParseError("wedge: expected an object");
    detail::reject_unknown(jw, {"axis", "aperture", "extent", "sides"}, "wedge");
    WedgeSpec W;
    W.edge = edge;
    const json& ja = detail::field(jw, "axis", "wedge");
    if (!ja.is_array() || (ja.size() != static_cast<std::size_t>(P.n) && ja.size() != c.dim()))
      throw ParseError("wedge.axis: expected " + std::to_string(P.n) + " y-components or " + std::to_string(c.dim()) +
                       " ambient components");
    P.wedge_axis = json::array();
    for (std::size_t k = 0; k < ja.size(); ++k) {
      const std::string loc = "wedge.axis[" + std::to_string(k) + "]";
      TruncatedPoly a(c.edge(), cap);
      if (ja[k].is_array()) {
        a = parse_terms(ja[k], c.edge(), cap, loc);
      } else {
        a = TruncatedPoly::constant(c.edge(), cap, parse_rational(ja[k], loc));
      }
      W.axis.push_back(a);
      P.wedge_axis.push_back(emit_terms(a));
    }
    W.aperture = jw.contains("aperture") ? parse_real(jw["aperture"], "wedge.aperture") : 1.0;
    W.extent = jw.contains("extent") ? parse_real(jw["extent"], "wedge.extent") : 1.0;
    const std::string sides = jw.value("sides", std::string("two"));
    if (sides == "two") {
      W.sides = Sides::two;
    } else if (sides == "plus") {
      W.sides = Sides::plus;
    } else if (sides == "minus") {
      W.sides = Sides::minus;
    } else {
      throw ParseError("wedge.sides: expected \"plus\", \"minus\" or \"two\"");
    }
    try {
      W.validate();
    } catch (const PreconditionError& e) {
      throw ParseError(std::string("wedge: ") + e.what());
    }
    P.wedge = W;
  }

  if (j.contains("config")) {
    if (!j["config"].is_object()) throw ParseError("config: expected an object");
    P.config = j["config"];
  }
  return P;
}

/// Parses problem text; JSON syntax errors carry line and column.
inline Problem parse_problem_text(const std::string& text, std::optional<int> cap_override = std::nullopt) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("JSON syntax error at " + detail::line_col(text, e.byte) + ": " + e.what());
  }
  return parse_problem(j, cap_override);
}

inline Problem load_problem(const std::string& path, std::optional<int> cap_override = std::nullopt) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot read problem file " + path);
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  try {
    return parse_problem_text(text, cap_override);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

/// Canonical document; parse(serialize(P)) serializes identically.
inline json serialize_problem(const Problem& P) {
  json j;
  j["n"] = P.n;
  j["degree_cap"] = P.degree_cap;
  j["hypersurface"][P.hypersurface_kind] = emit_terms(P.hypersurface);
  json gy = json::array();
  for (const auto& f : P.model.edge.f) gy.push_back(emit_terms(f));
  j["edge"]["graph_y"] = gy;
  j["edge"]["graph_v"] = emit_terms(P.model.edge.g);
  j["base_point"] = jvec(P.model.base);
  if (P.wedge) {
    json w;
    w["axis"] = P.wedge_axis;
    w["aperture"] = P.wedge->aperture;
    w["extent"] = P.wedge->extent;
    w["sides"] = to_string(P.wedge->sides);
    j["wedge"] = w;
  }
  j["config"] = P.config;
  return j;
}

}  // namespace eow::io

#endif  // EOW_IO_PROBLEM_HPP
