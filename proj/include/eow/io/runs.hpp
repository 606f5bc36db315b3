#ifndef EOW_IO_RUNS_HPP
#define EOW_IO_RUNS_HPP

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "eow/discs/lewy.hpp"
#include "eow/discs/slice.hpp"
#include "eow/io/format.hpp"
#include "eow/io/problem.hpp"
#include "eow/normal_form/classify.hpp"
#include "eow/screens/folding.hpp"

namespace eow::io {

inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_invalid = 1, exit_parse = 2, exit_rejected = 3, exit_no_guarantee = 4 };

inline json default_config() {
  return json::parse(R"({
  "seed": 0,
  "screens": {"t_points": 64, "boundary_samples": 1000, "target_grid": 50, "audit_polynomials": 20,
              "audit_degree": 4, "audit_tolerance": 1e-6, "marginal": 1e-9, "trace_samples": 200,
              "curve_samples": 200},
  "slice": {"xi_radius": "1/4", "eta_radius": "1/4", "audit_samples": 2000, "alpha": "1/4",
            "t": ["0"], "side": "plus", "minwedge_samples": 2000, "spike_samples": 2000, "union_samples": 20000},
  "sweep": {"xi_radius": "1/4", "eta_radius": "1/4", "audit_samples": 2000, "alpha": "1/4", "t_points": 5,
            "minwedge_samples": 2000, "spike_samples": 2000, "union_samples": 20000},
  "lewy": {"sigma": null, "deltas": [0.01, 0.03, 0.05], "modified": false, "angles": 720, "march_steps": 400,
           "edge_tolerance": 1e-12, "graph_tolerance": 1e-9, "max_delta": 0.25, "audit_polynomials": 20,
           "audit_degree": 4, "audit_tolerance": 1e-6, "angle_tolerance": 1e-3},
  "one_sided": {"deltas": [0.005, 0.01, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04, 0.045, 0.05], "tau_grid": 9,
                "tau_tilt": 1.0, "line_levels": 10, "resolution": 4e-4, "test_tilt": 0.5, "angles": 360,
                "audit_polynomials": 4, "angle_tolerance": 1e-3}
})");
}

namespace detail {

inline void check_keys(const json& cfg, const json& defaults, const std::string& where) {
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    const std::string loc = where.empty() ? it.key() : where + "." + it.key();
    if (!defaults.contains(it.key())) throw ParseError("config: unknown key '" + loc + "'");
    const json& d = defaults[it.key()];
    if (d.is_object()) {
      if (!it.value().is_object()) throw ParseError("config: '" + loc + "' must be an object");
      check_keys(it.value(), d, loc);
    }
  }
}

template <class T>
T cfg_get(const json& c, const char* key, const std::string& where) {
  try {
    return c.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError("config: '" + where + "." + key + "' has the wrong type");
  }
}

inline Scalar cfg_rat(const json& c, const char* key, const std::string& where) {
  return parse_rational(c.at(key), "config: " + where + "." + key);
}

inline std::vector<double> cfg_reals(const json& c, const char* key, const std::string& where) {
  const json& a = c.at(key);
  if (!a.is_array()) throw ParseError("config: '" + where + "." + key + "' must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    out.push_back(parse_real(a[i], "config: " + where + "." + key + "[" + std::to_string(i) + "]"));
  return out;
}

inline json checks_json(const std::vector<InequalityCheck>& checks) {
  json a = json::array();
  for (const auto& c : checks)
    a.push_back({{"name", c.name}, {"lhs", jrat(c.lhs)}, {"relation", c.relation}, {"rhs", jrat(c.rhs)}, {"holds", c.holds}});
  return a;
}

inline std::vector<Scalar> input_axis(const HypersurfaceModel& M, const WedgeSpec& W) {
  Coords c(M.n);
  std::vector<Scalar> axis(c.dim(), Scalar(0));
  if (W.axis.size() == c.dim()) {
    for (std::size_t i = 0; i < c.dim(); ++i) axis[i] = eval_poly(W.axis[i], M.base);
  } else {
    for (int k = 0; k < M.n; ++k) axis[c.y(k)] = eval_poly(W.axis[static_cast<std::size_t>(k)], M.base);
  }
  return axis;
}

inline const WedgeSpec& need_wedge(const Problem& P, const std::string& what) {
  if (!P.wedge) throw PreconditionError(what + " needs a wedge in the problem file");
  return *P.wedge;
}

}  // namespace detail

/// Defaults, then the problem's config, then an override document; unknown
/// keys are rejected.
inline json resolve_config(const json& problem_config, const json& override_config = json::object(),
                           std::optional<std::uint64_t> seed = std::nullopt) {
  const json defaults = default_config();
  detail::check_keys(problem_config, defaults, "");
  detail::check_keys(override_config, defaults, "");
  json c = defaults;
  c.merge_patch(problem_config);
  c.merge_patch(override_config);
  for (auto it = defaults.begin(); it != defaults.end(); ++it)
    if (it.value().is_object() && !c[it.key()].is_object()) c[it.key()] = it.value();
  if (seed) c["seed"] = *seed;
  if (!c["seed"].is_number_unsigned() && !(c["seed"].is_number_integer() && c["seed"].get<long long>() >= 0))
    throw ParseError("config: 'seed' must be a non-negative integer");
  return c;
}

struct Report {
  json doc;
  std::vector<CsvTable> traces;
  int exit_code = exit_ok;
};

namespace detail {

inline json report_header(const std::string& command, const std::string& target, const std::optional<Problem>& P,
                          const json& config) {
  json d;
  d["tool"] = "eow";
  d["version"] = tool_version;
  d["command"] = command;
  if (!target.empty()) d["target"] = target;
  d["input_digest"] = P ? hex64(fnv1a(canonical_dump(serialize_problem(*P)))) : std::string("none");
  d["config"] = config;
  d["seed"] = {{"seed", config["seed"]}};
  return d;
}

inline json normal_form_json(const NormalFormData& nf) {
  json j;
  j["Lambda"] = jmat(nf.Lambda);
  j["Omega"] = jmat(nf.Omega);
  j["Gamma"] = jmat(nf.Gamma);
  j["mu"] = jvec(nf.mu);
  j["frame"] = jmat(nf.frame.R);
  j["r_scale"] = jrat(nf.frame.r_scale);
  j["translation"] = jvec(nf.translation);
  j["graph_v"] = emit_terms(nf.h);
  return j;
}

inline json levi_json(const LeviData& L) {
  json j;
  j["eigenvalues"] = jvec(L.eigenvalues);
  j["signature"] = {{"plus", L.n_plus}, {"minus", L.n_minus}, {"zero", L.n_zero}};
  j["indefinite"] = L.indefinite();
  return j;
}

}  // namespace detail

inline Report run_classify(const Problem& P, const json& config) {
  Report R;
  R.doc = detail::report_header("classify", "", P, config);
  const NormalFormData nf = normal_form(P.model);
  json payload;
  payload["normal_form"] = detail::normal_form_json(nf);
  payload["levi"] = detail::levi_json(levi_data(nf.Lambda, nf.Omega));
  if (P.wedge) {
    const Classification cls = classify_wedge(P.model, *P.wedge);
    json c;
    c["verdict"] = to_string(cls.verdict);
    c["side"] = cls.side ? json(to_string(*cls.side)) : json(nullptr);
    c["witness"] = cls.witness ? jvec(*cls.witness) : json(nullptr);
    c["witness_n"] = cls.witness_n ? jvec(*cls.witness_n) : json(nullptr);
    c["witness_q"] = jnum(cls.witness_q);
    c["axis_n"] = jvec(cls.axis_n);
    c["q_axis"] = jnum(cls.q_axis);
    c["q_axis_exact"] = jrat(cls.q_axis_exact);
    c["levi_metric"] = detail::levi_json(cls.levi);
    c["null_search"] = {{"method", cls.search.method},
                        {"limitation", cls.search.limitation},
                        {"q_min", jnum(cls.search.q_min)},
                        {"q_max", jnum(cls.search.q_max)},
                        {"witness", cls.search.witness ? jvec(*cls.search.witness) : json(nullptr)}};
    c["notes"] = cls.notes;
    payload["classification"] = c;
    R.doc["margins"] = {{"q_axis", jnum(cls.q_axis)}, {"q_min", jnum(cls.search.q_min)}, {"q_max", jnum(cls.search.q_max)}};
    R.doc["status"] = to_string(cls.verdict);
    if (cls.verdict == Verdict::no_guarantee) R.exit_code = exit_no_guarantee;
  } else {
    R.doc["status"] = "normal form only";
    R.doc["margins"] = json::object();
  }
  R.doc["payload"] = payload;
  return R;
}

namespace detail {

inline Report certify_screens(Report R, const json& config) {
  const json& c = config["screens"];
  HullOptions opt;
  const int tp = cfg_get<int>(c, "t_points", "screens");
  if (tp < 1) throw PreconditionError("screens.t_points must be positive");
  for (int k = 0; k < tp; ++k) opt.t_grid.push_back(5.0 + (k + 0.5) / tp);
  opt.boundary_samples = cfg_get<int>(c, "boundary_samples", "screens");
  opt.target_grid = cfg_get<int>(c, "target_grid", "screens");
  opt.audit_polynomials = cfg_get<int>(c, "audit_polynomials", "screens");
  opt.audit_degree = cfg_get<int>(c, "audit_degree", "screens");
  opt.audit_tolerance = cfg_get<double>(c, "audit_tolerance", "screens");
  opt.marginal = cfg_get<double>(c, "marginal", "screens");
  opt.seed = config["seed"].get<std::uint64_t>();
  const HullCertificate cert = verify_screen_hull(opt);

  json p;
  p["target_set"] = cert.target;
  p["t_points"] = cert.t_grid.size();
  p["boundary_samples"] = cert.boundary_samples;
  p["target_grid"] = cert.target_grid;
  json discs = json::array();
  for (const auto& d : cert.discs)
    discs.push_back({{"t", jnum(d.t)},
                     {"min_margin", jnum(d.min_margin)},
                     {"worst_arc", d.worst_arc},
                     {"worst_y", jnum(d.worst_y)},
                     {"max_xi2", jnum(d.max_xi2)},
                     {"cross_check_failures", d.cross_check_failures},
                     {"audit_slack", jnum(d.audit_slack)}});
  p["discs"] = discs;
  json routes = json::object();
  for (const auto& e : cert.coverage) {
    const std::string k = to_string(e.route);
    routes[k] = routes.value(k, 0) + 1;
  }
  p["coverage_routes"] = routes;
  p["offending"] = cert.offending ? json(*cert.offending) : json(nullptr);
  R.doc["payload"] = p;
  R.doc["margins"] = {{"min_boundary_margin", jnum(cert.min_boundary_margin)},
                      {"min_cover_margin", jnum(cert.min_cover_margin)},
                      {"worst_audit_slack", jnum(cert.worst_audit_slack)}};
  R.doc["status"] = cert.status();
  if (!cert.valid) R.exit_code = exit_invalid;

  CsvTable t{"screen_discs.csv", {"t", "arc", "eta1", "eta2"}, {}};
  for (const auto& tp2 : disc_traces(cert.t_grid, cfg_get<int>(c, "trace_samples", "screens")))
    t.add({fmt_double(tp2.t), tp2.arc == FoldingDisc::right_arc ? "right" : "left", fmt_double(tp2.eta1),
           fmt_double(tp2.eta2)});
  const int cs = cfg_get<int>(c, "curve_samples", "screens");
  for (int k = 0; k < cs; ++k) {
    const double e1 = cs == 1 ? 0.0 : static_cast<double>(k) / (cs - 1);
    t.add({"", "eta2=2*eta1^2", fmt_double(e1), fmt_double(2 * e1 * e1)});
  }
  for (int k = 0; k < cs; ++k) {
    const double e1 = cs == 1 ? 0.0 : static_cast<double>(k) / (cs - 1);
    t.add({"", "eta2=eta1/2", fmt_double(e1), fmt_double(e1 / 2)});
  }
  R.traces.push_back(std::move(t));
  return R;
}

inline json sweep_side_json(const SweepSide& s) {
  json j;
  j["sign"] = s.sign;
  j["axis"] = jvec(s.axis);
  j["cone"] = {{"aperture", jrat(s.cone.aperture)},
               {"extent", jnum(s.cone.extent)},
               {"orthogonal", s.cone.orthogonal},
               {"axis", jvec(s.cone.axis)}};
  j["gamma"] = jrat(s.gamma);
  j["alpha_hat"] = jrat(s.alpha_hat);
  j["radius"] = jrat(s.radius);
  j["delta"] = jrat(s.delta);
  json slices = json::array();
  for (const auto& sl : s.slices) {
    json q;
    q["t"] = jvec(sl.t);
    q["Q"] = jrat(sl.Q);
    q["A"] = jrat(sl.A);
    q["B"] = jrat(sl.B);
    q["A_tilde"] = jrat(sl.A_tilde);
    q["A_prime"] = jrat(sl.A_prime);
    q["minwedge"] = {{"delta", jrat(sl.minwedge.delta)}, {"gamma", jrat(sl.minwedge.gamma)},
                     {"eps", jrat(sl.minwedge.eps)},     {"root_eps", jrat(sl.minwedge.root_eps)},
                     {"K", jrat(sl.minwedge.K)},         {"audit", checks_json(sl.minwedge.audit)}};
    const auto& m = sl.minwedge_report;
    q["minwedge_check"] = {{"samples", m.samples},
                           {"in_region", m.in_region},
                           {"excluded", m.excluded},
                           {"failures", m.failures},
                           {"min_wedge_margin", jnum(m.min_wedge_margin)},
                           {"min_tangential_margin", jnum(m.min_tangential_margin)},
                           {"min_proof_margin", jnum(m.min_proof_margin)},
                           {"min_normal_margin", jnum(m.min_normal_margin)},
                           {"comparability", {jnum(m.min_comparability), jnum(m.max_comparability)}},
                           {"first_failure", m.first_failure}};
    const auto& f = sl.fit;
    q["spike_fit"] = {{"q1", emit_terms(f.family.q1)},
                      {"q2", emit_terms(f.family.q2)},
                      {"m", emit_terms(f.family.m)},
                      {"alpha", jrat(f.alpha)},
                      {"alpha_hat", jrat(f.alpha_hat)},
                      {"beta", jrat(f.beta)},
                      {"ell", jrat(f.ell)},
                      {"r", jrat(f.r)},
                      {"growth", jrat(f.growth)},
                      {"samples", f.samples},
                      {"in_spike", f.in_spike},
                      {"failures", f.failures},
                      {"min_margin", jnum(f.min_margin)},
                      {"remainder_samples", f.remainder_samples},
                      {"remainder_failures", f.remainder_failures},
                      {"min_remainder_margin", jnum(f.min_remainder_margin)},
                      {"growth_exponents", {jnum(f.growth_audit.exponent[0]), jnum(f.growth_audit.exponent[1]),
                                            jnum(f.growth_audit.exponent[2])}},
                      {"growth_zero", {f.growth_audit.zero[0], f.growth_audit.zero[1], f.growth_audit.zero[2]}},
                      {"first_failure", f.first_failure}};
    q["spike"] = {{"eps", jrat(sl.spike.eps)},
                  {"K", jrat(sl.spike.K)},
                  {"delta", jrat(sl.spike.delta)},
                  {"audit", checks_json(sl.spike.audit)}};
    q["spike_union"] = {{"samples", sl.spike_union.samples},
                        {"bound_samples", sl.spike_union.bound_samples},
                        {"failures", sl.spike_union.failures},
                        {"min_margin", jnum(sl.spike_union.min_margin)}};
    q["delta"] = jrat(sl.delta);
    q["passed"] = sl.passed();
    slices.push_back(q);
  }
  j["slices"] = slices;
  return j;
}

inline SweepConfig sweep_config(const json& c, const std::string& where, std::uint64_t seed) {
  SweepConfig s;
  s.box.xi_radius = cfg_rat(c, "xi_radius", where);
  s.box.eta_radius = cfg_rat(c, "eta_radius", where);
  s.box.audit_samples = cfg_get<int>(c, "audit_samples", where);
  s.alpha = cfg_rat(c, "alpha", where);
  s.minwedge_samples = cfg_get<int>(c, "minwedge_samples", where);
  s.spike_samples = cfg_get<int>(c, "spike_samples", where);
  s.union_samples = cfg_get<int>(c, "union_samples", where);
  s.seed = seed;
  return s;
}

inline Report certify_sweep(Report R, const Problem& P, const json& config, bool single) {
  const WedgeSpec& W = need_wedge(P, single ? "slice certification" : "wedge sweep");
  const std::string where = single ? "slice" : "sweep";
  const json& c = config[where];
  SweepConfig s = sweep_config(c, where, config["seed"].get<std::uint64_t>());
  if (single) {
    const std::string side = cfg_get<std::string>(c, "side", where);
    if (side == "plus") {
      s.signs = {1};
    } else if (side == "minus") {
      s.signs = {-1};
    } else if (side == "both") {
      s.signs = {1, -1};
    } else {
      throw ParseError("config: 'slice.side' must be \"plus\", \"minus\" or \"both\"");
    }
    const json& ts = c.at("t");
    if (!ts.is_array() || ts.empty()) throw ParseError("config: 'slice.t' must be a non-empty array");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const std::string loc = "config: slice.t[" + std::to_string(i) + "]";
      std::vector<Scalar> t;
      if (ts[i].is_array()) {
        for (std::size_t k = 0; k < ts[i].size(); ++k) t.push_back(parse_rational(ts[i][k], loc));
      } else {
        t.push_back(parse_rational(ts[i], loc));
      }
      if (t.size() != static_cast<std::size_t>(P.n - 1))
        throw ParseError(loc + ": expected " + std::to_string(P.n - 1) + " slice coordinates");
      s.t_list.push_back(t);
    }
  } else {
    s.t_points = cfg_get<int>(c, "t_points", where);
  }
  const AmbientWedgeSample a = ambient_wedge_sweep(P.model, W, s);
  json p;
  p["axis"] = jvec(a.axis);
  p["delta"] = jrat(a.delta);
  p["radius"] = jrat(a.radius);
  p["round_aperture"] = jrat(a.round_aperture);
  p["kappa"] = jnum(a.kappa);
  p["hull_claim"] = a.hull_claim;
  json sides = json::array();
  double mw = std::numeric_limits<double>::infinity(), mp = mw, sf = mw, su = mw;
  for (const auto& sd : a.sides) {
    sides.push_back(sweep_side_json(sd));
    for (const auto& sl : sd.slices) {
      mw = std::min(mw, sl.minwedge_report.min_wedge_margin);
      mp = std::min(mp, sl.minwedge_report.min_proof_margin);
      sf = std::min(sf, sl.fit.min_margin);
      su = std::min(su, sl.spike_union.min_margin);
    }
  }
  p["sides"] = sides;
  R.doc["payload"] = p;
  R.doc["margins"] = {{"min_wedge_margin", jnum(mw)},
                      {"min_proof_margin", jnum(mp)},
                      {"min_spike_fit_margin", jnum(sf)},
                      {"min_spike_union_margin", jnum(su)},
                      {"delta", jnum(a.delta.get_d())}};
  const bool ok = a.passed();
  R.doc["status"] = ok ? "valid" : "invalid";
  if (!ok) R.exit_code = exit_invalid;
  return R;
}

inline LewyOptions lewy_options(const json& c, const std::string& where, std::uint64_t seed) {
  LewyOptions o;
  if (c.contains("angles")) o.angles = cfg_get<int>(c, "angles", where);
  if (c.contains("march_steps")) o.march_steps = cfg_get<int>(c, "march_steps", where);
  if (c.contains("edge_tolerance")) o.edge_tolerance = cfg_get<double>(c, "edge_tolerance", where);
  if (c.contains("graph_tolerance")) o.graph_tolerance = cfg_get<double>(c, "graph_tolerance", where);
  if (c.contains("max_delta")) o.max_delta = cfg_get<double>(c, "max_delta", where);
  if (c.contains("audit_polynomials")) o.audit_polynomials = cfg_get<int>(c, "audit_polynomials", where);
  if (c.contains("audit_degree")) o.audit_degree = cfg_get<int>(c, "audit_degree", where);
  if (c.contains("audit_tolerance")) o.audit_tolerance = cfg_get<double>(c, "audit_tolerance", where);
  o.seed = seed;
  return o;
}

inline Report certify_lewy(Report R, const Problem& P, const json& config) {
  const WedgeSpec& W = need_wedge(P, "Lewy disc certification");
  const json& c = config["lewy"];
  const auto axis = input_axis(P.model, W);
  FrameOptions fo;
  fo.axis = axis;
  const NormalFormData nf = normal_form(P.model, fo);
  const HatChange hat = hat_change(nf);
  const WedgeSpec Wh = hat_wedge(nf, hat, axis, W.aperture, W.extent, W.sides);
  std::vector<double> sigma(static_cast<std::size_t>(P.n), 0.0);
  sigma[0] = 1.0;
  if (!c.at("sigma").is_null()) sigma = cfg_reals(c, "sigma", "lewy");
  if (sigma.size() != static_cast<std::size_t>(P.n))
    throw ParseError("config: 'lewy.sigma' needs " + std::to_string(P.n) + " components");
  const auto deltas = cfg_reals(c, "deltas", "lewy");
  const bool modified = cfg_get<bool>(c, "modified", "lewy");
  const std::uint64_t seed = config["seed"].get<std::uint64_t>();

  json p;
  p["sigma"] = jvec(sigma);
  p["modified"] = modified;
  p["hat_graph_v"] = emit_terms(hat.h);
  json discs = json::array();
  CsvTable t{"lewy_boundary.csv", {"delta", "side", "xi1", "eta1", "xi2", "eta2"}, {}};
  double worst_r = -std::numeric_limits<double>::infinity(), worst_slack = worst_r;
  double ss = 0;
  for (double s : sigma) ss += s * s;
  std::uint64_t k = 0;
  for (double dl : deltas) {
    LewyOptions o = lewy_options(c, "lewy", seed + 7919ULL * k++);
    const LewyDisc d = lewy_disc(hat, Wh, sigma, dl, modified, o);
    discs.push_back({{"delta", jnum(dl)},
                     {"min_radius", jnum(d.min_radius)},
                     {"max_radius", jnum(d.max_radius)},
                     {"edge_crossings", d.edge_crossings},
                     {"plus", d.plus},
                     {"minus", d.minus},
                     {"boundary_samples", d.boundary.size()},
                     {"interior_samples", d.interior_samples},
                     {"max_interior_r", jnum(d.max_interior_r)},
                     {"audit_worst_slack", d.audit ? jnum(d.audit->worst_slack) : json(nullptr)},
                     {"center", jvec(d.center)}});
    worst_r = std::max(worst_r, d.max_interior_r);
    if (d.audit) worst_slack = std::max(worst_slack, d.audit->worst_slack);
    for (const auto& b : d.boundary) {
      const auto z = d.embed(b.zeta);
      cplx along = 0;
      for (std::size_t j = 0; j < sigma.size(); ++j) along += z[j] * sigma[j];
      along /= ss;
      t.add({fmt_double(dl), to_string(b.side), fmt_double(along.real()), fmt_double(along.imag()),
             fmt_double(z.back().real()), fmt_double(z.back().imag())});
    }
  }
  p["discs"] = discs;
  const double tol = cfg_get<double>(c, "angle_tolerance", "lewy");
  bool ok = true;
  if (deltas.size() >= 2) {
    const CenterCurve cc = center_curve(nf, hat, sigma, deltas, modified);
    p["center_curve"] = {{"a", jvec(cc.a)}, {"b", jvec(cc.b)}, {"tau", jvec(cc.tau)}, {"angle", jnum(cc.angle)}};
    R.doc["margins"]["center_angle"] = jnum(cc.angle);
    ok = cc.angle <= tol;
  }
  R.doc["margins"]["max_interior_r"] = jnum(worst_r);
  R.doc["margins"]["worst_audit_slack"] = jnum(worst_slack);
  R.doc["payload"] = p;
  R.doc["status"] = ok ? "valid" : "invalid";
  if (!ok) R.exit_code = exit_invalid;
  R.traces.push_back(std::move(t));
  return R;
}

inline Report certify_one_sided(Report R, const Problem& P, const json& config) {
  const WedgeSpec& W = need_wedge(P, "one-sided certification");
  const json& c = config["one_sided"];
  OneSidedConfig o;
  o.deltas = cfg_reals(c, "deltas", "one_sided");
  o.tau_grid = cfg_get<int>(c, "tau_grid", "one_sided");
  o.tau_tilt = cfg_get<double>(c, "tau_tilt", "one_sided");
  o.line_levels = cfg_get<int>(c, "line_levels", "one_sided");
  o.resolution = cfg_get<double>(c, "resolution", "one_sided");
  o.test_tilt = cfg_get<double>(c, "test_tilt", "one_sided");
  o.seed = config["seed"].get<std::uint64_t>();
  o.lewy = lewy_options(c, "one_sided", o.seed);
  const OneSidedReport rep = one_sided_set(P.model, W, o);
  json p;
  p["side"] = rep.side;
  p["sigma"] = jvec(rep.sigma_input);
  p["resolution"] = jnum(rep.resolution);
  p["resolution_note"] = "U is sampled; inclusion is certified only at the stated resolution";
  p["cloud_points"] = rep.cloud.size();
  p["taus"] = rep.taus.size();
  json cones = json::array();
  double worst = 0;
  for (const auto& ci : rep.cones) {
    cones.push_back({{"tau", jvec(ci.tau)},
                     {"dr_tau", jnum(ci.dr_tau)},
                     {"aperture", jnum(ci.aperture)},
                     {"extent", jnum(ci.extent)},
                     {"worst_distance", jnum(ci.worst_distance)},
                     {"samples", ci.samples}});
    worst = std::max(worst, ci.worst_distance);
  }
  p["cones"] = cones;
  p["boundary_labels"] = {{"plus", rep.plus}, {"minus", rep.minus}, {"edge", rep.edge}};
  p["subwedge_aperture"] = jnum(rep.subwedge_aperture);
  p["wedge_aperture"] = jnum(rep.wedge_aperture);
  p["center_angle"] = jnum(rep.center.angle);
  p["property_cone"] = rep.property1();
  p["property_subwedge"] = rep.property2();
  R.doc["payload"] = p;
  R.doc["margins"] = {{"worst_cone_distance", jnum(worst)},
                      {"subwedge_slack", jnum(rep.wedge_aperture - rep.subwedge_aperture)},
                      {"center_angle", jnum(rep.center.angle)}};
  const bool ok = rep.property1() && rep.property2() && rep.center.angle <= cfg_get<double>(c, "angle_tolerance", "one_sided");
  R.doc["status"] = ok ? "valid" : "invalid";
  if (!ok) R.exit_code = exit_invalid;
  CsvTable t{"one_sided_cloud.csv", {}, {}};
  for (const auto& v : Coords(P.n).ambient()) t.header.push_back(v);
  t.header.push_back("side");
  for (const auto& q : rep.cloud) {
    std::vector<std::string> row;
    for (double x : q) row.push_back(fmt_double(x));
    row.push_back(rep.side);
    t.add(std::move(row));
  }
  R.traces.push_back(std::move(t));
  return R;
}

}  // namespace detail

inline const std::vector<std::string>& certify_targets() {
  static const std::vector<std::string> t{"screens", "slice", "lewy", "sweep", "one-sided"};
  return t;
}

/// Certificate errors become an invalid report; other errors propagate.
inline Report run_certify(const std::optional<Problem>& P, const std::string& target, const json& config) {
  const json head = detail::report_header("certify", target, P, config);
  Report R;
  R.doc = head;
  if (target != "screens" && !P) throw PreconditionError("target '" + target + "' needs --input");
  try {
    if (target == "screens") return detail::certify_screens(std::move(R), config);
    if (target == "slice") return detail::certify_sweep(std::move(R), *P, config, true);
    if (target == "sweep") return detail::certify_sweep(std::move(R), *P, config, false);
    if (target == "lewy") return detail::certify_lewy(std::move(R), *P, config);
    if (target == "one-sided") return detail::certify_one_sided(std::move(R), *P, config);
  } catch (const CertificateError& e) {
    R = Report{};
    R.doc = head;
    R.doc["status"] = "invalid";
    R.doc["error"] = e.what();
    R.doc["payload"] = nullptr;
    R.doc["margins"] = json::object();
    R.traces.clear();
    R.exit_code = exit_invalid;
    return R;
  }
  throw ParseError("unknown certify target '" + target + "'");
}

}  // namespace eow::io

#endif  // EOW_IO_RUNS_HPP
