#pragma once
//
// Checkers for the bound
//
//   (1 + 2 ||H(sigma_AB)||_inf) Ent(rho_AB || sigma_AB) >= Ent(rho_A || sigma_A) + Ent(rho_B || sigma_B)
//
// and for each link of its four-step derivation:
//
//   1. Ent(rho_AB||sigma_AB) >= Ent(rho_A||sigma_A) + Ent(rho_B||sigma_B) - log tr M
//   2. log tr M <= tr[L (rho_A - sigma_A) (x) (rho_B - sigma_B)]
//   3. tr[L (rho_A - sigma_A) (x) (rho_B - sigma_B)] <= 2 ||L||_inf Ent(rho_AB||sigma_AB)
//   4. ||L||_inf <= ||H||_inf
//
// Every checker evaluates both sides from the input states only; no
// subexpression is shared between a left- and a right-hand side.
//

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "entrolab/entropy.hpp"
#include "entrolab/report.hpp"
#include "entrolab/superops.hpp"
#include "entrolab/wlp.hpp"

namespace entrolab {

namespace detail {

inline double finite_entropy(const HermitianOperator& f, const HermitianOperator& g, const char* what) {
  const auto e = relative_entropy_positive(f, g);
  if (e.is_infinite()) throw DomainError(std::string(what) + " is infinite on full-rank inputs", 0.0);
  return e.value();
}

struct Pieces {
  DensityOperator rho_a, rho_b, sigma_a, sigma_b;
};

inline Pieces pieces(const DensityOperator& rho, const DensityOperator& sigma, const BipartiteDims& dims) {
  auto [ra, rb] = marginals(rho, dims);
  auto [sa, sb] = marginals(sigma, dims);
  return {std::move(ra), std::move(rb), std::move(sa), std::move(sb)};
}

/// tr[x (a (x) b)].
inline double pair_with_product(const HermitianOperator& x, const Matrix& a, const Matrix& b) {
  return (x.matrix() * tensor(a, b)).trace().real();
}

}  // namespace detail

/// Throws DomainError unless sigma_AB, sigma_A, sigma_B, rho_A and rho_B are
/// all positive definite (rho_AB itself may be rank deficient).
inline void require_full_rank_inputs(const DensityOperator& rho, const DensityOperator& sigma,
                                     const BipartiteDims& dims) {
  dims.require_matches(rho.dim(), "rho_AB");
  dims.require_matches(sigma.dim(), "sigma_AB");
  require_positive_definite(eig_hermitian(sigma), "sigma_AB");
  const auto p = detail::pieces(rho, sigma, dims);
  require_positive_definite(eig_hermitian(p.sigma_a), "sigma_A");
  require_positive_definite(eig_hermitian(p.sigma_b), "sigma_B");
  require_positive_definite(eig_hermitian(p.rho_a), "rho_A");
  require_positive_definite(eig_hermitian(p.rho_b), "rho_B");
}

/// alpha(sigma_AB) Ent(rho_AB||sigma_AB) >= Ent(rho_A||sigma_A) + Ent(rho_B||sigma_B).
inline InequalityReport check_main_theorem(const DensityOperator& rho, const DensityOperator& sigma,
                                           const BipartiteDims& dims, const Tolerances& tol = {}) {
  require_full_rank_inputs(rho, sigma, dims);
  const double h_norm = operator_norm(H_operator(sigma, dims));
  const double alpha = 1.0 + 2.0 * h_norm;
  const double d_full = detail::finite_entropy(rho, sigma, "Ent(rho_AB||sigma_AB)");
  const auto p = detail::pieces(rho, sigma, dims);
  const double d_a = detail::finite_entropy(p.rho_a, p.sigma_a, "Ent(rho_A||sigma_A)");
  const double d_b = detail::finite_entropy(p.rho_b, p.sigma_b, "Ent(rho_B||sigma_B)");
  auto r = make_report("main_theorem", alpha * d_full, d_a + d_b, Relation::greater_equal, tol.inequality);
  r.metadata["alpha"] = format_value(alpha);
  r.metadata["h_norm"] = format_value(h_norm);
  return r;
}

/// Step 1 plus the identity Ent(rho_AB||sigma_AB) - Ent(rho_A||sigma_A) - Ent(rho_B||sigma_B)
/// = tr[rho_AB (log rho_AB - log M)] and the trace bound Ent(rho||M) >= -log tr M.
inline InequalityReport check_step1(const DensityOperator& rho, const DensityOperator& sigma,
                                    const BipartiteDims& dims, const Tolerances& tol = {}) {
  require_full_rank_inputs(rho, sigma, dims);
  const double d_full = detail::finite_entropy(rho, sigma, "Ent(rho_AB||sigma_AB)");
  const auto p = detail::pieces(rho, sigma, dims);
  const double d_a = detail::finite_entropy(p.rho_a, p.sigma_a, "Ent(rho_A||sigma_A)");
  const double d_b = detail::finite_entropy(p.rho_b, p.sigma_b, "Ent(rho_B||sigma_B)");
  const auto m = step1_M(rho, sigma, dims);
  const double log_tr_m = std::log(m.trace());
  const double ent_rho_m = detail::finite_entropy(rho, m, "Ent(rho_AB||M)");

  auto r = make_report("step1", d_full, d_a + d_b - log_tr_m, Relation::greater_equal, tol.inequality);
  r.metadata["log_tr_M"] = format_value(log_tr_m);
  r.links.push_back(make_report("step1.identity", d_full - d_a - d_b, ent_rho_m, Relation::equal,
                                tol.identity));
  r.links.push_back(make_report("step1.trace_bound", ent_rho_m, -log_tr_m, Relation::greater_equal,
                                tol.inequality));
  return r;
}

/// Step 2 with its links: log x <= x - 1 at x = tr M, Lieb's bound
/// tr M <= tr[rho_A (x) rho_B T_{sigma_A (x) sigma_B}(sigma_AB)], and the
/// orthogonality identity tr[L rho_A (x) rho_B] = tr[L (rho_A - sigma_A) (x) (rho_B - sigma_B)].
inline InequalityReport check_step2(const DensityOperator& rho, const DensityOperator& sigma,
                                    const BipartiteDims& dims, const Tolerances& tol = {}) {
  require_full_rank_inputs(rho, sigma, dims);
  const auto m = step1_M(rho, sigma, dims);
  const double tr_m = m.trace();
  const double log_tr_m = std::log(tr_m);
  const auto p = detail::pieces(rho, sigma, dims);
  const auto l = L_operator(sigma, dims);
  const Matrix delta_a = p.rho_a.matrix() - p.sigma_a.matrix();
  const Matrix delta_b = p.rho_b.matrix() - p.sigma_b.matrix();
  const double pairing = detail::pair_with_product(l, delta_a, delta_b);

  auto r = make_report("step2", log_tr_m, pairing, Relation::less_equal, tol.inequality);
  r.metadata["tr_M"] = format_value(tr_m);
  r.links.push_back(make_report("step2.log_le_linear", log_tr_m, tr_m - 1.0, Relation::less_equal,
                                tol.inequality));
  const double lieb = lieb_rhs(log_m(tensor(p.sigma_a.op(), p.sigma_b.op())), log_m(sigma),
                               log_m(tensor(p.rho_a.op(), p.rho_b.op())));
  r.links.push_back(make_report("step2.lieb", tr_m, lieb, Relation::less_equal, tol.inequality));
  r.links.push_back(make_report("step2.linear_le_pairing", tr_m - 1.0,
                                detail::pair_with_product(l, p.rho_a.matrix(), p.rho_b.matrix()),
                                Relation::less_equal, tol.inequality));
  r.links.push_back(make_report("step2.orthogonality_identity",
                                detail::pair_with_product(l, p.rho_a.matrix(), p.rho_b.matrix()), pairing,
                                Relation::equal, tol.identity));
  return r;
}

/// Step 3 with its links: Hoelder, trace-norm multiplicativity on tensor
/// products, Pinsker on each marginal and 2 sqrt(d_A d_B) <= 2 d_AB.
inline InequalityReport check_step3(const DensityOperator& rho, const DensityOperator& sigma,
                                    const BipartiteDims& dims, const Tolerances& tol = {}) {
  require_full_rank_inputs(rho, sigma, dims);
  const auto p = detail::pieces(rho, sigma, dims);
  const auto l = L_operator(sigma, dims);
  const double l_norm = operator_norm(l);
  const Matrix delta_a = p.rho_a.matrix() - p.sigma_a.matrix();
  const Matrix delta_b = p.rho_b.matrix() - p.sigma_b.matrix();
  const double pairing = detail::pair_with_product(l, delta_a, delta_b);
  const double d_full = detail::finite_entropy(rho, sigma, "Ent(rho_AB||sigma_AB)");
  const double d_a = detail::finite_entropy(p.rho_a, p.sigma_a, "Ent(rho_A||sigma_A)");
  const double d_b = detail::finite_entropy(p.rho_b, p.sigma_b, "Ent(rho_B||sigma_B)");
  const double n_a = trace_norm(delta_a);
  const double n_b = trace_norm(delta_b);
  const double n_ab = trace_norm(tensor(delta_a, delta_b));

  auto r = make_report("step3", pairing, 2.0 * l_norm * d_full, Relation::less_equal, tol.inequality);
  r.metadata["l_norm"] = format_value(l_norm);
  r.links.push_back(make_report("step3.holder", pairing, l_norm * n_ab, Relation::less_equal, tol.inequality));
  r.links.push_back(make_report("step3.tensor_multiplicativity", n_ab, n_a * n_b, Relation::equal, tol.identity));
  r.links.push_back(make_report("step3.pinsker_a", n_a, std::sqrt(2.0 * std::max(d_a, 0.0)),
                                Relation::less_equal, tol.inequality));
  r.links.push_back(make_report("step3.pinsker_b", n_b, std::sqrt(2.0 * std::max(d_b, 0.0)),
                                Relation::less_equal, tol.inequality));
  r.links.push_back(make_report("step3.monotonicity_mean", 2.0 * std::sqrt(std::max(d_a * d_b, 0.0)),
                                2.0 * d_full, Relation::less_equal, tol.inequality));
  return r;
}

/// ||H||_inf <= ||(sigma_A (x) sigma_B)^{-1/2}||_inf^2 ||sigma_AB - sigma_A (x) sigma_B||_1,
/// i.e. the trace-distance bound with sigma_min^-2 read as 1 / lambda_min(sigma_A (x) sigma_B).
inline InequalityReport check_remark_bound(const DensityOperator& sigma, const BipartiteDims& dims,
                                           const Tolerances& tol = {}) {
  const auto [sa, sb] = marginals(sigma, dims);
  const auto product = tensor(sa.op(), sb.op());
  const auto s = eig_hermitian(product);
  require_positive_definite(s, "sigma_A (x) sigma_B");
  const double inv_sq = std::pow(operator_norm(power_m(s, -0.5)), 2);
  const double distance = trace_norm(sigma.op() - product);
  auto r = make_report("remark_bound", operator_norm(H_operator(sigma, dims)), inv_sq * distance,
                       Relation::less_equal, tol.inequality);
  r.metadata["sigma_min_inv_sq"] = format_value(inv_sq);
  return r;
}

/// ||L(sigma_AB)||_inf <= ||H(sigma_AB)||_inf, with the trace-distance bound on ||H|| as a link.
inline InequalityReport check_step4(const DensityOperator& sigma, const BipartiteDims& dims,
                                    const Tolerances& tol = {}) {
  dims.require_matches(sigma.dim(), "sigma_AB");
  const double l_norm = operator_norm(L_operator(sigma, dims));
  const double h_norm = operator_norm(H_operator(sigma, dims));
  auto r = make_report("step4", l_norm, h_norm, Relation::less_equal, tol.inequality);
  r.links.push_back(check_remark_bound(sigma, dims, tol));
  r.links.back().name = "step4.remark_bound";
  return r;
}

/// ||rho - sigma||_1^2 <= 2 Ent(rho||sigma); passes trivially at +inf.
inline InequalityReport check_pinsker(const DensityOperator& rho, const DensityOperator& sigma,
                                      const Tolerances& tol = {}) {
  const double n = trace_norm(rho.op() - sigma.op());
  const auto e = relative_entropy(rho, sigma);
  const ExtendedReal rhs = e.is_infinite() ? ExtendedReal::infinity() : ExtendedReal(2.0 * e.value());
  return make_report("pinsker", n * n, rhs, Relation::less_equal, tol.inequality);
}

/// Non-negativity, monotonicity under partial trace, additivity, the
/// mutual-information decomposition, superadditivity for product
/// references, the factor-2 bound, the trace lower bound and the scaling
/// identity, each as its own report.
inline std::vector<InequalityReport> check_classical_suite(const DensityOperator& rho,
                                                           const DensityOperator& sigma,
                                                           const BipartiteDims& dims,
                                                           const Tolerances& tol = {}) {
  require_full_rank_inputs(rho, sigma, dims);
  const auto p = detail::pieces(rho, sigma, dims);
  const ExtendedReal d_full = relative_entropy(rho, sigma);
  const ExtendedReal d_a = relative_entropy(p.rho_a, p.sigma_a);
  const ExtendedReal d_b = relative_entropy(p.rho_b, p.sigma_b);
  const auto rho_prod = tensor(p.rho_a, p.rho_b);
  const auto sigma_prod = tensor(p.sigma_a, p.sigma_b);
  const ExtendedReal additive = relative_entropy(rho_prod, sigma_prod);
  const ExtendedReal mi = mutual_information(rho, dims);
  const ExtendedReal vs_product = relative_entropy(rho, sigma_prod);
  const double marg = d_a.value() + d_b.value();

  std::vector<InequalityReport> out;
  out.push_back(make_report("classical.non_negativity", d_full, 0.0, Relation::greater_equal, tol.inequality));
  out.push_back(make_report("classical.monotonicity_a", d_full, d_a, Relation::greater_equal, tol.inequality));
  out.push_back(make_report("classical.monotonicity_b", d_full, d_b, Relation::greater_equal, tol.inequality));
  out.push_back(make_report("classical.additivity", additive, marg, Relation::equal, tol.identity));
  out.push_back(make_report("classical.mutual_information_non_negative", mi, 0.0, Relation::greater_equal,
                            tol.inequality));
  out.push_back(make_report("classical.decomposition", vs_product, mi.value() + marg, Relation::equal,
                            tol.identity));
  out.push_back(make_report("classical.superadditivity", vs_product, marg, Relation::greater_equal,
                            tol.inequality));
  out.push_back(make_report("classical.factor_two",
                            d_full.is_infinite() ? ExtendedReal::infinity() : ExtendedReal(2.0 * d_full.value()),
                            marg, Relation::greater_equal, tol.inequality));
  const auto m = step1_M(rho, sigma, dims);
  out.push_back(make_report("classical.trace_lower_bound", relative_entropy_positive(rho, m),
                            entropy_lower_bound(rho, m), Relation::greater_equal, tol.inequality));
  out.push_back(make_report("classical.homogeneity", scaled_entropy_shift(rho, sigma, 2.0, 3.0),
                            std::log(2.0 / 3.0), Relation::equal, tol.identity));
  return out;
}

// ---------------------------------------------------------------------------
// Breakdown
// ---------------------------------------------------------------------------

/// Every intermediate quantity of the four-step argument for one pair.
struct TheoremBreakdown {
  double d_full = 0.0;     // Ent(rho_AB||sigma_AB)
  double d_a = 0.0;        // Ent(rho_A||sigma_A)
  double d_b = 0.0;        // Ent(rho_B||sigma_B)
  double tr_m = 0.0;
  double log_tr_m = 0.0;
  double step2_rhs = 0.0;  // tr[L (rho_A - sigma_A) (x) (rho_B - sigma_B)]
  double l_norm = 0.0;
  double h_norm = 0.0;
  double alpha = 1.0;      // 1 + 2 h_norm
  bool improvement_regime = false;  // alpha < 2
  std::vector<InequalityReport> chain;  // step1, step2, step3, step4, main_theorem
  InequalityReport l_bound;             // (1 + 2||L||) d_full >= d_a + d_b
  InequalityReport composition;         // the theorem at the composite tolerance
  bool chain_consistent = true;         // steps all pass => composition passes

  const InequalityReport& theorem() const { return chain.back(); }

  bool all_pass() const {
    for (const auto& r : chain)
      if (!r.all_pass()) return false;
    return !l_bound.failed() && !composition.failed() && chain_consistent;
  }
};

inline TheoremBreakdown run_breakdown(const DensityOperator& rho, const DensityOperator& sigma,
                                      const BipartiteDims& dims, const Tolerances& tol = {}) {
  require_full_rank_inputs(rho, sigma, dims);
  TheoremBreakdown b;
  const auto p = detail::pieces(rho, sigma, dims);
  b.d_full = detail::finite_entropy(rho, sigma, "Ent(rho_AB||sigma_AB)");
  b.d_a = detail::finite_entropy(p.rho_a, p.sigma_a, "Ent(rho_A||sigma_A)");
  b.d_b = detail::finite_entropy(p.rho_b, p.sigma_b, "Ent(rho_B||sigma_B)");
  b.tr_m = step1_M(rho, sigma, dims).trace();
  b.log_tr_m = std::log(b.tr_m);
  const auto l = L_operator(sigma, dims);
  b.l_norm = operator_norm(l);
  b.step2_rhs = detail::pair_with_product(l, p.rho_a.matrix() - p.sigma_a.matrix(),
                                          p.rho_b.matrix() - p.sigma_b.matrix());
  b.h_norm = operator_norm(H_operator(sigma, dims));
  b.alpha = 1.0 + 2.0 * b.h_norm;
  b.improvement_regime = b.alpha < 2.0;

  b.chain.push_back(check_step1(rho, sigma, dims, tol));
  b.chain.push_back(check_step2(rho, sigma, dims, tol));
  b.chain.push_back(check_step3(rho, sigma, dims, tol));
  b.chain.push_back(check_step4(sigma, dims, tol));
  b.chain.push_back(check_main_theorem(rho, sigma, dims, tol));

  b.l_bound = make_report("l_bound", (1.0 + 2.0 * b.l_norm) * b.d_full, b.d_a + b.d_b,
                          Relation::greater_equal, tol.inequality);
  b.composition = make_report("composition", b.alpha * b.d_full, b.d_a + b.d_b, Relation::greater_equal,
                              tol.composite);
  bool steps_pass = true;
  for (std::size_t i = 0; i < 4; ++i) steps_pass = steps_pass && b.chain[i].all_pass();
  b.chain_consistent = !steps_pass || b.composition.pass();
  return b;
}

inline void to_json(nlohmann::json& j, const TheoremBreakdown& b) {
  j = nlohmann::json{{"d_full", b.d_full},
                     {"d_a", b.d_a},
                     {"d_b", b.d_b},
                     {"tr_m", b.tr_m},
                     {"log_tr_m", b.log_tr_m},
                     {"step2_rhs", b.step2_rhs},
                     {"l_norm", b.l_norm},
                     {"h_norm", b.h_norm},
                     {"alpha", b.alpha},
                     {"improvement_regime", b.improvement_regime},
                     {"chain", b.chain},
                     {"l_bound", b.l_bound},
                     {"composition", b.composition},
                     {"chain_consistent", b.chain_consistent}};
}

// ---------------------------------------------------------------------------
// Input preparation
// ---------------------------------------------------------------------------

struct PreparedPair {
  DensityOperator rho;
  DensityOperator sigma;
  double rho_smoothing = 0.0;
  double sigma_smoothing = 0.0;
};

/// Returns the pair ready for the full-rank pipeline. Rank-deficient inputs
/// (sigma_AB, or rho with a singular marginal) are mixed with weight
/// `eps` of the maximally mixed state when `allow_smoothing` is set;
/// otherwise std::nullopt is returned and `reason` names the defect.
inline std::optional<PreparedPair> prepare_full_rank(const DensityOperator& rho, const DensityOperator& sigma,
                                                     const BipartiteDims& dims, bool allow_smoothing,
                                                     std::string* reason = nullptr, double eps = 1e-6) {
  dims.require_matches(rho.dim(), "rho_AB");
  dims.require_matches(sigma.dim(), "sigma_AB");
  const auto full_rank = [](const DensityOperator& x) { return is_positive_definite(eig_hermitian(x)); };
  const auto [ra, rb] = marginals(rho, dims);
  const bool sigma_ok = full_rank(sigma);
  const bool rho_ok = full_rank(ra) && full_rank(rb);
  if ((!sigma_ok || !rho_ok) && !allow_smoothing) {
    if (reason != nullptr) *reason = !sigma_ok ? "sigma_AB is rank deficient" : "a marginal of rho_AB is rank deficient";
    return std::nullopt;
  }
  const auto mix = [eps](const DensityOperator& x) {
    const Eigen::Index d = x.dim();
    return DensityOperator::from((1.0 - eps) * x.op() + (eps / static_cast<double>(d)) * HermitianOperator::identity(d));
  };
  return PreparedPair{rho_ok ? rho : mix(rho), sigma_ok ? sigma : mix(sigma), rho_ok ? 0.0 : eps,
                      sigma_ok ? 0.0 : eps};
}

}  // namespace entrolab
