#pragma once
//
// rho-weighted non-commutative L^p norms
//
//   ||f||_{p,rho} = tr[ |rho^{1/2p} f rho^{1/2p}|^p ]^{1/p},   ||f||_{inf,rho} = ||f||_inf,
//
// the pairing <f, g>_rho = tr[sqrt(rho) f sqrt(rho) g], the (1, inf)
// duality witness and the L^1(rho) contraction check for channels with
// T*(rho) = rho.
//

#include <cmath>
#include <limits>
#include <utility>

#include "entrolab/report.hpp"
#include "entrolab/superops.hpp"

namespace entrolab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// A full-rank weight and an exponent p in [1, inf].
class WeightedSpace {
 public:
  WeightedSpace(DensityOperator rho, double p) : rho_(std::move(rho)), p_(p) {
    if (!(p_ >= 1.0)) throw InvalidInputError("L^p(rho) requires p >= 1");
    spectrum_ = eig_hermitian(rho_);
    require_positive_definite(spectrum_, "L^p weight rho");
  }

  const DensityOperator& rho() const noexcept { return rho_; }
  double p() const noexcept { return p_; }
  const SpectralDecomposition& spectrum() const noexcept { return spectrum_; }

 private:
  DensityOperator rho_;
  double p_;
  SpectralDecomposition spectrum_;
};

inline double lp_norm(const HermitianOperator& f, const WeightedSpace& w) {
  detail::require_same_dim(f.matrix(), w.rho().matrix(), "lp_norm");
  const double p = w.p();
  if (std::isinf(p)) return operator_norm(f);
  const Matrix c = power_m(w.spectrum(), 1.0 / (2.0 * p)).matrix();
  const auto s = eig_hermitian(hermitize(c * f.matrix() * c));
  const RealVector mags = s.eigenvalues.cwiseAbs();
  const double top = mags.maxCoeff();
  if (top == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mags.size(); ++i) acc += std::pow(mags(i) / top, p);
  return top * std::pow(acc, 1.0 / p);
}

inline double lp_norm(const HermitianOperator& f, const DensityOperator& rho, double p) {
  return lp_norm(f, WeightedSpace(rho, p));
}

/// <f, g>_rho = tr[sqrt(rho) f sqrt(rho) g]. The imaginary residue must be
/// below 1e-10 (relative to the magnitude) and is then dropped.
inline double rho_inner(const HermitianOperator& f, const HermitianOperator& g,
                        const DensityOperator& rho) {
  detail::require_same_dim(f.matrix(), g.matrix(), "rho_inner");
  detail::require_same_dim(f.matrix(), rho.matrix(), "rho_inner");
  const auto s = eig_hermitian(rho);
  require_positive_definite(s, "rho_inner weight");
  const Matrix root = power_m(s, 0.5).matrix();
  const Complex v = (root * f.matrix() * root * g.matrix()).trace();
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) {
    throw NumericalError("rho_inner: non-negligible imaginary part");
  }
  return v.real();
}

struct DualityWitness {
  HermitianOperator witness;
  double value;
};

/// Y = sign(rho^{1/2} f rho^{1/2}) with sign(0) = +1; <Y, f>_rho then
/// attains ||f||_{1,rho} while ||Y||_inf <= 1.
inline DualityWitness duality_witness_l1(const HermitianOperator& f, const DensityOperator& rho) {
  const auto sr = eig_hermitian(rho);
  require_positive_definite(sr, "duality weight");
  const Matrix root = power_m(sr, 0.5).matrix();
  const auto inner = eig_hermitian(hermitize(root * f.matrix() * root));
  auto y = matrix_function(inner, [](double x) { return x < 0.0 ? -1.0 : 1.0; });
  const double value = rho_inner(y, f, rho);
  return {std::move(y), value};
}

/// ||T(x)||_{1,rho} <= ||x||_{1,rho}. The hypothesis T*(rho) = rho is
/// measured; a defect above `fixed_point_tol` makes the report inapplicable.
inline InequalityReport check_l1_contraction(const ChannelRep& t, const DensityOperator& rho,
                                             const HermitianOperator& x, double tolerance = 1e-9,
                                             double fixed_point_tol = 1e-9) {
  const double defect = frobenius_distance(apply_channel(channel_dual(t), rho.matrix()), rho.matrix());
  if (defect > fixed_point_tol) {
    auto r = make_inapplicable("l1_contraction", "T*(rho) != rho");
    r.metadata["fixed_point_defect"] = format_value(defect);
    return r;
  }
  const WeightedSpace l1(rho, 1.0);
  const double lhs = lp_norm(hermitize(apply_channel(t, x.matrix())), l1);
  const double rhs = lp_norm(x, l1);
  auto r = make_report("l1_contraction", lhs, rhs, Relation::less_equal, tolerance);
  r.metadata["fixed_point_defect"] = format_value(defect);
  return r;
}

}  // namespace entrolab
