#pragma once
//
// The superoperator T_g (Frechet derivative of the matrix logarithm at g)
//
//   T_g(f) = int_0^inf (g + t)^-1 f (g + t)^-1 dt
//          = int beta_0(t) g^{(-1-it)/2} f g^{(-1+it)/2} dt,
//
// the correction operators L(sigma_AB) and H(sigma_AB), the auxiliary
// operator M, and Kraus-form channels.
//

#include <cmath>
#include <string>
#include <vector>

#include "entrolab/linalg.hpp"
#include "entrolab/quadrature.hpp"

namespace entrolab {

/// Relative gap below which two eigenvalues are treated as coincident in
/// the divided-difference kernel.
inline constexpr double kDegenerateGap = 1e-12;

/// First divided difference of log at (lambda, mu), i.e.
/// int_0^inf (lambda + t)^-1 (mu + t)^-1 dt. `scale` is lambda_max of the
/// spectrum the pair comes from.
inline double log_divided_difference(double lambda, double mu, double scale) {
  const double gap = lambda - mu;
  if (std::abs(gap) <= kDegenerateGap * std::max(scale, 1.0)) return 2.0 / (lambda + mu);
  return std::log1p(gap / mu) / gap;
}

/// T_g(f) in closed form: in g's eigenbasis entry (i,j) of f is scaled by
/// the log divided difference at (lambda_i, lambda_j).
inline Matrix tg_kernel(const SpectralDecomposition& g, const Matrix& f) {
  require_positive_definite(g, "T_g base operator");
  if (f.rows() != g.dim() || f.cols() != g.dim()) throw DimensionError("tg_kernel: dimension mismatch");
  const Matrix& u = g.eigenvectors;
  Matrix rotated = u.adjoint() * f * u;
  const double scale = g.max();
  for (Eigen::Index j = 0; j < g.dim(); ++j)
    for (Eigen::Index i = 0; i < g.dim(); ++i)
      rotated(i, j) *= log_divided_difference(g.eigenvalues(i), g.eigenvalues(j), scale);
  return u * rotated * u.adjoint();
}

inline Matrix tg_kernel(const HermitianOperator& g, const Matrix& f) {
  return tg_kernel(eig_hermitian(g), f);
}

inline HermitianOperator tg_kernel(const HermitianOperator& g, const HermitianOperator& f) {
  return hermitize(tg_kernel(eig_hermitian(g), f.matrix()));
}

/// T_g(f) by composite quadrature of the beta_0 representation. Independent
/// of tg_kernel: each node builds the complex powers of g explicitly.
inline Matrix tg_quadrature(const HermitianOperator& g, const Matrix& f,
                            const QuadratureSpec& spec = {}) {
  const auto s = eig_hermitian(g);
  require_positive_definite(s, "T_g base operator");
  if (f.rows() != g.dim() || f.cols() != g.dim()) {
    throw DimensionError("tg_quadrature: dimension mismatch");
  }
  const auto nodes = composite_nodes(spec);
  Matrix acc = Matrix::Zero(g.dim(), g.dim());
  for (const auto& node : nodes) {
    const double w = node.weight * beta0(node.t);
    const Matrix left = complex_power(s, Complex(-0.5, -0.5 * node.t));
    const Matrix right = complex_power(s, Complex(-0.5, 0.5 * node.t));
    acc.noalias() += w * (left * f * right);
  }
  return acc;
}

/// tr[e^h T_{e^f}(e^g)], the right-hand side of Lieb's three-operator bound
/// tr exp(-f + g + h) <= tr[e^h T_{e^f}(e^g)].
inline double lieb_rhs(const HermitianOperator& f, const HermitianOperator& g,
                       const HermitianOperator& h) {
  detail::require_same_dim(f.matrix(), g.matrix(), "lieb_rhs");
  detail::require_same_dim(f.matrix(), h.matrix(), "lieb_rhs");
  const Matrix t = tg_kernel(exp_m(f), exp_m(g).matrix());
  const Complex value = (exp_m(h).matrix() * t).trace();
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real()))) {
    throw NumericalError("lieb_rhs: trace has non-negligible imaginary part");
  }
  return value.real();
}

struct Marginals {
  DensityOperator a;
  DensityOperator b;
};

inline Marginals marginals(const DensityOperator& x, const BipartiteDims& dims) {
  dims.require_matches(x.dim(), "marginals");
  return {partial_trace(x, dims, Subsystem::A), partial_trace(x, dims, Subsystem::B)};
}

/// M = exp[log sigma_AB - log sigma_A (x) sigma_B + log rho_A (x) rho_B].
/// Requires sigma_AB, sigma_A (x) sigma_B, rho_A and rho_B positive definite.
inline HermitianOperator step1_M(const DensityOperator& rho, const DensityOperator& sigma,
                                 const BipartiteDims& dims) {
  dims.require_matches(rho.dim(), "step1_M rho");
  dims.require_matches(sigma.dim(), "step1_M sigma");
  const auto [rho_a, rho_b] = marginals(rho, dims);
  const auto [sigma_a, sigma_b] = marginals(sigma, dims);
  const auto s_sigma = eig_hermitian(sigma);
  require_positive_definite(s_sigma, "sigma_AB");
  const auto s_prod = eig_hermitian(tensor(sigma_a.op(), sigma_b.op()));
  require_positive_definite(s_prod, "sigma_A (x) sigma_B");
  require_positive_definite(eig_hermitian(rho_a), "rho_A");
  require_positive_definite(eig_hermitian(rho_b), "rho_B");
  const auto log_fn = [](double x) { return std::log(x); };
  const auto log_sigma = matrix_function(s_sigma, log_fn);
  const auto log_prod = matrix_function(s_prod, log_fn);
  const auto log_rho_prod = log_m(tensor(rho_a.op(), rho_b.op()));
  return exp_m(log_sigma - log_prod + log_rho_prod);
}

/// L(sigma_AB) = T_{sigma_A (x) sigma_B}(sigma_AB) - 1.
inline HermitianOperator L_operator(const DensityOperator& sigma, const BipartiteDims& dims) {
  const auto [sigma_a, sigma_b] = marginals(sigma, dims);
  const auto t = tg_kernel(tensor(sigma_a.op(), sigma_b.op()), sigma.op());
  return t - HermitianOperator::identity(sigma.dim());
}

/// H(sigma_AB) = (sigma_A^-1/2 (x) sigma_B^-1/2) sigma_AB (sigma_A^-1/2 (x) sigma_B^-1/2) - 1.
inline HermitianOperator H_operator(const DensityOperator& sigma, const BipartiteDims& dims) {
  const auto [sigma_a, sigma_b] = marginals(sigma, dims);
  const auto sa = eig_hermitian(sigma_a);
  const auto sb = eig_hermitian(sigma_b);
  require_positive_definite(sa, "sigma_A");
  require_positive_definite(sb, "sigma_B");
  const Matrix c = tensor(power_m(sa, -0.5).matrix(), power_m(sb, -0.5).matrix());
  return hermitize(c * sigma.matrix() * c) - HermitianOperator::identity(sigma.dim());
}

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

/// Linear map x -> sum_k K_k x K_k^dagger.
struct ChannelRep {
  std::vector<Matrix> kraus;

  Eigen::Index dim() const { return kraus.empty() ? 0 : kraus.front().rows(); }

  /// Frobenius distance of sum_k K_k^dagger K_k from the identity.
  double completeness_defect() const {
    const Eigen::Index d = dim();
    Matrix acc = Matrix::Zero(d, d);
    for (const auto& k : kraus) acc.noalias() += k.adjoint() * k;
    return (acc - Matrix::Identity(d, d)).norm();
  }
};

inline ChannelRep identity_channel(Eigen::Index d) { return {{Matrix::Identity(d, d)}}; }

inline Matrix apply_channel(const ChannelRep& t, const Matrix& x) {
  if (t.kraus.empty()) throw InvalidInputError("channel has no Kraus operators");
  if (x.rows() != t.dim() || x.cols() != t.dim()) throw DimensionError("apply_channel: dimension mismatch");
  Matrix acc = Matrix::Zero(x.rows(), x.cols());
  Matrix tmp(x.rows(), x.cols());
  for (const auto& k : t.kraus) {
    tmp.noalias() = k * x;
    acc.noalias() += tmp * k.adjoint();
  }
  return acc;
}

/// Hilbert-Schmidt dual: Kraus set {K^dagger}.
inline ChannelRep channel_dual(const ChannelRep& t) {
  ChannelRep dual;
  dual.kraus.reserve(t.kraus.size());
  for (const auto& k : t.kraus) dual.kraus.push_back(k.adjoint());
  return dual;
}

/// Dephasing in rho's eigenbasis: Kraus operators are the rank-one projectors
/// onto rho's eigenvectors. Self-dual, and both T and T* fix rho.
inline ChannelRep pinching_channel(const DensityOperator& rho) {
  const auto s = eig_hermitian(rho);
  ChannelRep t;
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    const auto v = s.eigenvectors.col(i);
    t.kraus.push_back(v * v.adjoint());
  }
  return t;
}

/// Upper bound on completeness_defect() accepted for the quadrature-based
/// modular average.
inline constexpr double kModularTraceDefect = 1e-9;

/// x -> int beta_0(t) rho^{it/2} x rho^{-it/2} dt as the weighted Kraus
/// family {sqrt(w_k beta_0(t_k)) rho^{i t_k / 2}} over the quadrature nodes.
/// Throws NumericalError if the trace-preservation defect exceeds 1e-9.
inline ChannelRep modular_average_channel(const DensityOperator& rho, const QuadratureSpec& spec = {}) {
  const auto s = eig_hermitian(rho);
  require_positive_definite(s, "modular average weight");
  ChannelRep t;
  for (const auto& node : composite_nodes(spec)) {
    const double w = node.weight * beta0(node.t);
    if (w == 0.0) continue;
    t.kraus.push_back(std::sqrt(w) * complex_power(s, Complex(0.0, 0.5 * node.t)));
  }
  const double defect = t.completeness_defect();
  if (defect > kModularTraceDefect) {
    throw NumericalError("modular average channel trace defect " + std::to_string(defect) +
                         " exceeds 1e-9");
  }
  return t;
}

}  // namespace entrolab
