#ifndef EOW_NORMAL_FORM_CLASSIFY_HPP
#define EOW_NORMAL_FORM_CLASSIFY_HPP

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "eow/error.hpp"
#include "eow/geometry/wedge.hpp"
#include "eow/normal_form/levi.hpp"
#include "eow/normal_form/model.hpp"
#include "eow/normal_form/pipeline.hpp"

namespace eow {

enum class Verdict { two_sided, one_sided, no_guarantee };

/// Side of M that one-sided extension fills, named by the sign of the input r.
enum class ExtensionSide { r_negative, r_positive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::two_sided: return "TwoSidedExtension";
    case Verdict::one_sided: return "OneSidedExtension";
    case Verdict::no_guarantee: return "NoGuarantee";
  }
  return "?";
}

inline std::string to_string(ExtensionSide s) { return s == ExtensionSide::r_negative ? "r<0" : "r>0"; }

struct Classification {
  Verdict verdict = Verdict::no_guarantee;
  std::optional<ExtensionSide> side;
  std::optional<std::vector<double>> witness;  // unit ambient vector in input coordinates
  std::optional<std::vector<double>> witness_n;  // same, in orthonormal coordinates of N
  double witness_q = 0;                        // q(witness) with the N metric
  LeviData levi;
  std::vector<double> axis_n;  // unit axis in orthonormal coordinates of N
  double q_axis = 0;
  Scalar q_axis_exact = 0;     // s^t Lambda s for the exact normal-frame coordinates s of the axis
  DMatrix Lambda_orth;         // Lambda in orthonormal coordinates of N
  NullSearch search;
  std::vector<std::string> notes;
};

/// Hermitian Gram matrix of the frame e_1..e_n, as seen from the complex structure.
inline Eigen::MatrixXcd frame_hermitian_gram(const NormalFormData& nf) {
  Coords c(nf.n);
  const auto n = static_cast<Eigen::Index>(nf.n);
  Eigen::MatrixXcd G(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < n; ++l) {
      const auto& ek = nf.frame.basis[static_cast<std::size_t>(k)];
      const auto& el = nf.frame.basis[static_cast<std::size_t>(l)];
      G(k, l) = {to_double(dot(ek, el)), to_double(dot(ek, c.J(el)))};
    }
  return G;
}

/// Eigenvalues of the Levi form of M at the base point with respect to the
/// ambient metric on H and a unit conormal; invariant under unitary changes
/// of the input coordinates.
inline std::vector<double> metric_levi_eigenvalues(const HypersurfaceModel& M, const NormalFormData& nf) {
  const auto n = static_cast<Eigen::Index>(nf.n);
  Eigen::MatrixXcd L(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      L(i, j) = {to_double(nf.Lambda(static_cast<std::size_t>(i), static_cast<std::size_t>(j))),
                 to_double(nf.Omega(static_cast<std::size_t>(i), static_cast<std::size_t>(j)))};
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(L, frame_hermitian_gram(nf), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("frame Gram matrix is not positive definite");
  double grad = 0;
  for (const auto& g : M.gradient_at_base()) grad += to_double(g) * to_double(g);
  const double scale = to_double(nf.frame.r_scale) * std::sqrt(grad);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i) / scale);
  std::sort(out.begin(), out.end());
  return out;
}

/// Applies the extension criteria to the wedge W attached to M's edge at
/// the base point of M; nf must be the unaligned normal form of M.
inline Classification classify_wedge(const HypersurfaceModel& M, const WedgeSpec& W, const NormalFormData& nf) {
  W.validate();
  if (W.edge.n != M.n) throw PreconditionError("wedge and hypersurface dimensions differ");
  Coords c(M.n);
  const auto n = static_cast<std::size_t>(M.n);

  // Axis at the base point, in input coordinates.
  std::vector<Scalar> sigma(c.dim(), Scalar(0));
  if (W.axis.size() == c.dim()) {
    for (std::size_t i = 0; i < c.dim(); ++i) sigma[i] = eval_poly(W.axis[i], M.base);
  } else {
    for (std::size_t k = 0; k < n; ++k) sigma[c.y(static_cast<int>(k))] = eval_poly(W.axis[k], M.base);
  }
  if (std::all_of(sigma.begin(), sigma.end(), [](const Scalar& s) { return s == 0; }))
    throw PreconditionError("wedge axis vanishes at the base point");

  const auto s_full = *inverse(nf.frame.R) * sigma;
  std::vector<Scalar> s(n);
  for (std::size_t k = 0; k < c.dim(); ++k) {
    const bool is_y = k >= n && k < 2 * n;
    if (is_y) s[k - n] = s_full[k];
    else if (s_full[k] != 0)
      throw PreconditionError("wedge axis is not a CR-normal direction: it must lie in J(T_pE) and be tangent to M");
  }

  Classification out;
  out.levi = levi_data(nf.Lambda, nf.Omega);
  out.q_axis_exact = dot(s, nf.Lambda * s);

  // Orthonormal coordinates on N: G = L L^t, w = L^t s.
  Eigen::MatrixXd G(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::MatrixXd Lam(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      G(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = to_double(dot(nf.frame.basis[k], nf.frame.basis[l]));
      Lam(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = to_double(nf.Lambda(k, l));
    }
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw NumericalError("frame Gram matrix is not positive definite");
  const Eigen::MatrixXd Lc = llt.matrixL();
  const Eigen::MatrixXd Linv = Lc.inverse();
  const Eigen::MatrixXd Lorth = Linv * Lam * Linv.transpose();
  Eigen::VectorXd sv(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) sv(static_cast<Eigen::Index>(k)) = to_double(s[k]);
  const Eigen::VectorXd w = (Lc.transpose() * sv).normalized();

  out.Lambda_orth = DMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      out.Lambda_orth(k, l) = Lorth(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
  out.axis_n = detail::from_eigen(w);
  out.q_axis = w.dot(Lorth * w);

  out.search = find_null_in_cone(out.Lambda_orth, RoundConeSpec(out.axis_n, W.aperture, W.extent));

  // Map a unit direction in orthonormal N coordinates back to the input frame.
  auto to_input = [&](const std::vector<double>& d) {
    Eigen::VectorXd coeff = Linv.transpose() * detail::to_eigen(d);
    std::vector<double> amb(c.dim(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto je = c.J(nf.frame.basis[k]);
      for (std::size_t i = 0; i < c.dim(); ++i) amb[i] += coeff(static_cast<Eigen::Index>(k)) * to_double(je[i]);
    }
    return normalized(amb);
  };
  auto set_witness = [&](const std::vector<double>& d) {
    out.witness_n = d;
    out.witness = to_input(d);
    out.witness_q = dot(d, out.Lambda_orth * d);
  };

  if (out.levi.n_zero == static_cast<int>(n) && nf.Omega == QMatrix(n, n))
    out.notes.push_back("Levi form vanishes at the base point");
  if (out.Lambda_orth.rows() > 0 && nf.Lambda == QMatrix(n, n))
    out.notes.push_back("all directions in N are null");

  if (out.levi.indefinite() && out.search.witness) {
    out.verdict = Verdict::two_sided;
    set_witness(*out.search.witness);
  } else if (out.search.q_max > 0 || out.q_axis_exact > 0) {
    out.verdict = Verdict::one_sided;
    out.side = ExtensionSide::r_negative;
    set_witness(out.q_axis_exact > 0 ? out.axis_n : out.search.argmax);
  } else if (out.search.q_min < 0 || out.q_axis_exact < 0) {
    out.verdict = Verdict::one_sided;
    out.side = ExtensionSide::r_positive;
    set_witness(out.q_axis_exact < 0 ? out.axis_n : out.search.argmin);
  } else {
    out.verdict = Verdict::no_guarantee;
  }

  if (out.levi.indefinite() && !out.search.witness)
    out.notes.push_back(
        "Levi form is indefinite but the wedge cone contains no null direction: two-sided extension is not "
        "guaranteed, and continuous CR functions on such wedges need not extend");
  if (!out.levi.indefinite() && out.search.witness)
    out.notes.push_back("null direction found but the Levi form is semidefinite; two-sided criterion does not apply");
  return out;
}

inline Classification classify_wedge(const HypersurfaceModel& M, const WedgeSpec& W) {
  return classify_wedge(M, W, normal_form(M));
}

}  // namespace eow

#endif  // EOW_NORMAL_FORM_CLASSIFY_HPP
