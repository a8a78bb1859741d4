#pragma once
//
// Dense complex-Hermitian matrix engine: Hermitian and density operator
// types, spectral decomposition, matrix functions, tensor products, partial
// traces and the Schatten norms used throughout the library.
//
// Bipartite index convention: subsystem A is the major index, i.e. basis
// vector |i_a, i_b> sits at position i_a * dim_b + i_b.
//

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include "entrolab/errors.hpp"

namespace entrolab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double hermitian_entry = 1e-12;     // |x_ij - conj(x_ji)| accepted as Hermitian
inline constexpr double non_hermitian_flag = 1e-8;   // hermitize() advisory threshold
inline constexpr double trace_real = 1e-10;
inline constexpr double trace_imag = 1e-12;
inline constexpr double psd_floor = 1e-10;           // eigenvalues in [-floor, 0] clamp to 0
inline constexpr double rank_relative = 1e-12;       // lambda <= rank_relative * lambda_max counts as zero
}  // namespace tol

class HermitianOperator;

namespace detail {
inline void require_square(const Matrix& x, std::string_view what) {
  if (x.rows() != x.cols() || x.rows() < 1) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << x.rows() << "x" << x.cols();
    throw DimensionError(os.str());
  }
}

inline void require_same_dim(const Matrix& x, const Matrix& y, std::string_view what) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    std::ostringstream os;
    os << what << ": dimension mismatch " << x.rows() << "x" << x.cols() << " vs " << y.rows()
       << "x" << y.cols();
    throw DimensionError(os.str());
  }
}

inline double max_asymmetry(const Matrix& x) { return (x - x.adjoint()).cwiseAbs().maxCoeff(); }
}  // namespace detail

/// Dense Hermitian operator. Every instance is exactly self-adjoint: entries
/// are re-symmetrized as (x + x^dagger)/2 on construction.
class HermitianOperator {
 public:
  /// Accepts `m` if it is Hermitian within 1e-12 per entry; throws otherwise.
  static HermitianOperator from_matrix(const Matrix& m) {
    detail::require_square(m, "HermitianOperator");
    const double asym = detail::max_asymmetry(m);
    if (!(asym <= tol::hermitian_entry)) {
      std::ostringstream os;
      os << "matrix is not Hermitian: max |x_ij - conj(x_ji)| = " << asym;
      throw ValidationError(os.str());
    }
    return HermitianOperator(symmetrize(m));
  }

  static HermitianOperator identity(Eigen::Index d) {
    return HermitianOperator(Matrix::Identity(d, d));
  }
  static HermitianOperator zero(Eigen::Index d) { return HermitianOperator(Matrix::Zero(d, d)); }
  static HermitianOperator diagonal(const RealVector& diag) {
    return HermitianOperator(diag.cast<Complex>().asDiagonal().toDenseMatrix());
  }

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  HermitianOperator operator+(const HermitianOperator& o) const {
    detail::require_same_dim(m_, o.m_, "operator+");
    return HermitianOperator(m_ + o.m_);
  }
  HermitianOperator operator-(const HermitianOperator& o) const {
    detail::require_same_dim(m_, o.m_, "operator-");
    return HermitianOperator(m_ - o.m_);
  }
  HermitianOperator operator-() const { return HermitianOperator(-m_); }
  friend HermitianOperator operator*(double s, const HermitianOperator& h) {
    return HermitianOperator(s * h.m_);
  }

 private:
  explicit HermitianOperator(Matrix m) : m_(std::move(m)) {}

  static Matrix symmetrize(const Matrix& x) { return 0.5 * (x + x.adjoint()); }

  friend HermitianOperator hermitize(const Matrix& x, double* asymmetry);

  Matrix m_;
};

inline HermitianOperator operator*(const HermitianOperator& h, double s) { return s * h; }

/// Returns (x + x^dagger)/2. When `asymmetry` is non-null it receives the
/// maximum entrywise |x - x^dagger|; callers treat values above
/// tol::non_hermitian_flag as a non-Hermitian input.
inline HermitianOperator hermitize(const Matrix& x, double* asymmetry = nullptr) {
  detail::require_square(x, "hermitize");
  if (asymmetry != nullptr) {
    *asymmetry = detail::max_asymmetry(x);
  }
  return HermitianOperator(HermitianOperator::symmetrize(x));
}

/// True when hermitize() would flag `x` as non-Hermitian.
inline bool is_flagged_non_hermitian(const Matrix& x) {
  return detail::max_asymmetry(x) > tol::non_hermitian_flag;
}

/// Eigenvalues ascending, eigenvectors as columns of a unitary matrix.
struct SpectralDecomposition {
  RealVector eigenvalues;
  Matrix eigenvectors;

  double min() const { return eigenvalues(0); }
  double max() const { return eigenvalues(eigenvalues.size() - 1); }
  Eigen::Index dim() const { return eigenvalues.size(); }
};

inline SpectralDecomposition eig_hermitian(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Unit-trace positive semidefinite operator.
class DensityOperator {
 public:
  /// Validates trace and positivity. Eigenvalues in [-1e-10, 0) are clamped
  /// to zero; anything more negative is rejected.
  static DensityOperator from(const HermitianOperator& h) {
    const Complex tr = h.matrix().trace();
    if (std::abs(tr.real() - 1.0) > tol::trace_real || std::abs(tr.imag()) > tol::trace_imag) {
      std::ostringstream os;
      os.precision(17);
      os << "density operator must have unit trace, got " << tr.real();
      throw ValidationError(os.str());
    }
    auto spec = eig_hermitian(h);
    if (spec.min() < -tol::psd_floor) {
      std::ostringstream os;
      os << "density operator must be positive semidefinite, min eigenvalue " << spec.min();
      throw ValidationError(os.str());
    }
    if (spec.min() >= 0.0) {
      return DensityOperator(h);
    }
    spec.eigenvalues = spec.eigenvalues.cwiseMax(0.0);
    const Matrix& u = spec.eigenvectors;
    return DensityOperator(hermitize(u * spec.eigenvalues.cast<Complex>().asDiagonal() * u.adjoint()));
  }

  static DensityOperator from_matrix(const Matrix& m) {
    return from(HermitianOperator::from_matrix(m));
  }

  static DensityOperator maximally_mixed(Eigen::Index d) {
    return DensityOperator(HermitianOperator::identity(d) * (1.0 / static_cast<double>(d)));
  }

  const HermitianOperator& op() const noexcept { return op_; }
  const Matrix& matrix() const noexcept { return op_.matrix(); }
  Eigen::Index dim() const noexcept { return op_.dim(); }
  operator const HermitianOperator&() const noexcept { return op_; }  // NOLINT

 private:
  explicit DensityOperator(HermitianOperator h) : op_(std::move(h)) {}
  HermitianOperator op_;
};

// ---------------------------------------------------------------------------
// Matrix functions
// ---------------------------------------------------------------------------

/// U diag(f(lambda)) U^dagger for a real-valued f. Non-finite f(lambda)
/// means lambda lies outside f's domain and raises DomainError.
template <class F>
HermitianOperator matrix_function(const SpectralDecomposition& s, F&& f) {
  RealVector values(s.dim());
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    const double lambda = s.eigenvalues(i);
    values(i) = f(lambda);
    if (!std::isfinite(values(i))) {
      std::ostringstream os;
      os.precision(17);
      os << "matrix function undefined at eigenvalue " << lambda;
      throw DomainError(os.str(), lambda);
    }
  }
  const Matrix& u = s.eigenvectors;
  return hermitize(u * values.cast<Complex>().asDiagonal() * u.adjoint());
}

template <class F>
HermitianOperator matrix_function(const HermitianOperator& h, F&& f) {
  return matrix_function(eig_hermitian(h), std::forward<F>(f));
}

/// Complex-valued spectral calculus; the result is a general matrix.
template <class F>
Matrix complex_matrix_function(const SpectralDecomposition& s, F&& f) {
  Eigen::VectorXcd values(s.dim());
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    const double lambda = s.eigenvalues(i);
    values(i) = f(lambda);
    if (!std::isfinite(values(i).real()) || !std::isfinite(values(i).imag())) {
      std::ostringstream os;
      os.precision(17);
      os << "matrix function undefined at eigenvalue " << lambda;
      throw DomainError(os.str(), lambda);
    }
  }
  const Matrix& u = s.eigenvectors;
  return u * values.asDiagonal() * u.adjoint();
}

inline HermitianOperator log_m(const HermitianOperator& h) {
  return matrix_function(h, [](double x) { return x > 0.0 ? std::log(x) : std::nan(""); });
}

inline HermitianOperator exp_m(const HermitianOperator& h) {
  return matrix_function(h, [](double x) { return std::exp(x); });
}

/// Real power x^p. For p > 0 round-off negatives down to -1e-10 lambda_max
/// are treated as zero; for p <= 0 the operator must be positive definite.
inline HermitianOperator power_m(const SpectralDecomposition& s, double p) {
  const double floor = tol::psd_floor * std::max(1.0, std::abs(s.max()));
  return matrix_function(s, [p, floor](double x) {
    if (p > 0.0 && x < 0.0 && x >= -floor) x = 0.0;
    if (x < 0.0 || (p <= 0.0 && x == 0.0)) return std::nan("");
    return std::pow(x, p);
  });
}

inline HermitianOperator power_m(const HermitianOperator& h, double p) {
  return power_m(eig_hermitian(h), p);
}

/// lambda^z = exp(z log lambda) for complex z; requires a positive definite spectrum.
inline Matrix complex_power(const SpectralDecomposition& s, Complex z) {
  return complex_matrix_function(s, [z](double x) {
    if (!(x > 0.0)) return Complex(std::nan(""), 0.0);
    return std::exp(z * std::log(x));
  });
}

/// h^{it}: unitary for positive definite h.
inline Matrix imaginary_power(const HermitianOperator& h, double t) {
  return complex_power(eig_hermitian(h), Complex(0.0, t));
}

/// Throws DomainError naming `what` unless lambda_min > 1e-12 lambda_max.
inline void require_positive_definite(const SpectralDecomposition& s, std::string_view what) {
  const double floor = tol::rank_relative * std::max(s.max(), 0.0);
  if (!(s.min() > floor) || !(s.min() > 0.0)) {
    std::ostringstream os;
    os << what << " is not positive definite (min eigenvalue " << s.min() << ")";
    throw DomainError(os.str(), s.min());
  }
}

inline bool is_positive_definite(const SpectralDecomposition& s) {
  return s.min() > 0.0 && s.min() > tol::rank_relative * s.max();
}

// ---------------------------------------------------------------------------
// Bipartite structure
// ---------------------------------------------------------------------------

struct BipartiteDims {
  Eigen::Index dim_a = 1;
  Eigen::Index dim_b = 1;

  Eigen::Index total() const { return dim_a * dim_b; }

  void validate() const {
    if (dim_a < 1 || dim_b < 1) throw DimensionError("bipartite dims must be positive");
  }
  void require_matches(Eigen::Index n, std::string_view what) const {
    validate();
    if (n != total()) {
      std::ostringstream os;
      os << what << ": operator dimension " << n << " does not equal " << dim_a << "*" << dim_b;
      throw DimensionError(os.str());
    }
  }
  friend bool operator==(const BipartiteDims&, const BipartiteDims&) = default;
};

enum class Subsystem { A, B };

/// Kronecker product, A-major: (a (x) b)[(ia,ib),(ja,jb)] = a[ia][ja] * b[ib][jb].
inline Matrix tensor(const Matrix& a, const Matrix& b) {
  const Eigen::Index rb = b.rows(), cb = b.cols();
  Matrix out(a.rows() * rb, a.cols() * cb);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return out;
}

inline HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  return hermitize(tensor(a.matrix(), b.matrix()));
}

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator::from(tensor(a.op(), b.op()));
}

/// Traces out the subsystem not selected by `keep`.
inline Matrix partial_trace(const Matrix& x, const BipartiteDims& dims, Subsystem keep) {
  detail::require_square(x, "partial_trace");
  dims.require_matches(x.rows(), "partial_trace");
  const Eigen::Index da = dims.dim_a, db = dims.dim_b;
  if (keep == Subsystem::A) {
    Matrix out = Matrix::Zero(da, da);
    for (Eigen::Index i = 0; i < da; ++i)
      for (Eigen::Index j = 0; j < da; ++j)
        for (Eigen::Index k = 0; k < db; ++k) out(i, j) += x(i * db + k, j * db + k);
    return out;
  }
  Matrix out = Matrix::Zero(db, db);
  for (Eigen::Index k = 0; k < db; ++k)
    for (Eigen::Index l = 0; l < db; ++l)
      for (Eigen::Index i = 0; i < da; ++i) out(k, l) += x(i * db + k, i * db + l);
  return out;
}

inline HermitianOperator partial_trace(const HermitianOperator& x, const BipartiteDims& dims,
                                       Subsystem keep) {
  return hermitize(partial_trace(x.matrix(), dims, keep));
}

inline DensityOperator partial_trace(const DensityOperator& x, const BipartiteDims& dims,
                                     Subsystem keep) {
  return DensityOperator::from(partial_trace(x.op(), dims, keep));
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

inline RealVector singular_values(const Matrix& x) {
  Eigen::JacobiSVD<Matrix> svd(x);
  return svd.singularValues();
}

/// Schatten-1 norm: sum of singular values.
inline double trace_norm(const Matrix& x) { return singular_values(x).sum(); }
inline double trace_norm(const HermitianOperator& x) {
  return eig_hermitian(x).eigenvalues.cwiseAbs().sum();
}

/// Largest singular value.
inline double operator_norm(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  return singular_values(x).maxCoeff();
}
inline double operator_norm(const HermitianOperator& x) {
  const auto s = eig_hermitian(x);
  return std::max(std::abs(s.min()), std::abs(s.max()));
}

inline double frobenius_distance(const Matrix& x, const Matrix& y) { return (x - y).norm(); }

}  // namespace entrolab
