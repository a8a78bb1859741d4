#pragma once
//
// Relative entropy of positive operators, mutual information and the
// scaling identities for unnormalized arguments.
//
// Ent(f||g) = tr[f (log f - log g)] / tr[f], +inf when supp f is not
// contained in supp g.
//

#include <cmath>
#include <limits>
#include <ostream>

#include "entrolab/linalg.hpp"

namespace entrolab {

/// A finite real or +infinity. Finite values are never NaN.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  ExtendedReal(double v) : value_(v) {  // NOLINT: implicit from finite reals
    if (std::isnan(v)) throw NumericalError("ExtendedReal cannot hold NaN");
    if (std::isinf(v)) {
      if (v < 0) throw NumericalError("ExtendedReal cannot hold -inf");
      infinite_ = true;
    }
  }

  static ExtendedReal infinity() {
    ExtendedReal e;
    e.infinite_ = true;
    e.value_ = std::numeric_limits<double>::infinity();
    return e;
  }

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }

  /// Finite value; throws on +inf.
  double value() const {
    if (infinite_) throw InvalidInputError("relative entropy is +inf");
    return value_;
  }
  /// Finite value or IEEE +inf.
  double as_double() const noexcept { return value_; }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& e) {
    if (e.infinite_) return os << "+inf";
    return os << e.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

namespace entropy_tol {
inline constexpr double trace_floor = 1e-14;        // tr f at or below this is rejected
inline constexpr double support_leak = 1e-10;      // max normalized mass of f on ker g
}  // namespace entropy_tol

/// Ent(f||g) for PSD f, g. Eigenvalues <= 1e-12 lambda_max are zero; f's
/// kernel contributes 0 log 0 = 0; f's mass on g's numerical kernel above
/// 1e-10 (relative to tr f) gives +inf.
inline ExtendedReal relative_entropy_positive(const HermitianOperator& f,
                                              const HermitianOperator& g) {
  detail::require_same_dim(f.matrix(), g.matrix(), "relative_entropy");
  const double tr_f = f.trace();
  if (!(tr_f > entropy_tol::trace_floor)) {
    throw InvalidInputError("relative entropy requires tr f > 0");
  }
  if (!(g.trace() > entropy_tol::trace_floor)) {
    throw InvalidInputError("relative entropy requires tr g > 0");
  }
  const auto sf = eig_hermitian(f);
  const auto sg = eig_hermitian(g);
  for (const auto* s : {&sf, &sg}) {
    if (s->min() < -tol::psd_floor * std::max(1.0, s->max())) {
      throw InvalidInputError("relative entropy requires positive semidefinite arguments");
    }
  }

  const double zero_g = tol::rank_relative * sg.max();
  const Matrix& v = sg.eigenvectors;
  RealVector log_g(sg.dim());
  double kernel_mass = 0.0;
  for (Eigen::Index j = 0; j < sg.dim(); ++j) {
    if (sg.eigenvalues(j) <= zero_g) {
      log_g(j) = 0.0;
      kernel_mass += (v.col(j).adjoint() * f.matrix() * v.col(j))(0, 0).real();
    } else {
      log_g(j) = std::log(sg.eigenvalues(j));
    }
  }
  if (kernel_mass / tr_f > entropy_tol::support_leak) {
    return ExtendedReal::infinity();
  }

  const double zero_f = tol::rank_relative * sf.max();
  double f_log_f = 0.0;
  for (Eigen::Index i = 0; i < sf.dim(); ++i) {
    const double p = sf.eigenvalues(i);
    if (p > zero_f) f_log_f += p * std::log(p);
  }
  // tr[f log g] restricted to supp g.
  const Matrix log_g_op = v * log_g.cast<Complex>().asDiagonal() * v.adjoint();
  const double f_log_g = (f.matrix().cwiseProduct(log_g_op.transpose())).sum().real();
  return ExtendedReal((f_log_f - f_log_g) / tr_f);
}

inline ExtendedReal relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
  return relative_entropy_positive(rho.op(), sigma.op());
}

/// Ent(a f || b g) - Ent(f || g); equals log(a/b).
inline double scaled_entropy_shift(const HermitianOperator& f, const HermitianOperator& g, double a,
                                   double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidInputError("scale factors must be positive");
  const auto scaled = relative_entropy_positive(a * f, b * g);
  const auto base = relative_entropy_positive(f, g);
  if (scaled.is_infinite() || base.is_infinite()) {
    throw InvalidInputError("scaled_entropy_shift requires finite relative entropies");
  }
  return scaled.value() - base.value();
}

/// -log(tr g / tr f): lower bound on Ent(f||g) for unnormalized arguments.
inline double entropy_lower_bound(const HermitianOperator& f, const HermitianOperator& g) {
  const double tf = f.trace(), tg = g.trace();
  if (!(tf > 0.0) || !(tg > 0.0)) throw InvalidInputError("traces must be positive");
  return -std::log(tg / tf);
}

/// I(A:B) = Ent(rho_AB || rho_A (x) rho_B).
inline ExtendedReal mutual_information(const DensityOperator& rho, const BipartiteDims& dims) {
  dims.require_matches(rho.dim(), "mutual_information");
  const auto rho_a = partial_trace(rho, dims, Subsystem::A);
  const auto rho_b = partial_trace(rho, dims, Subsystem::B);
  return relative_entropy(rho, tensor(rho_a, rho_b));
}

}  // namespace entrolab
