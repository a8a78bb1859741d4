#pragma once
// Test-side generators and oracles. Deliberately independent of the
// library routes they check: matrix functions come from Eigen's
// unsupported MatrixFunctions module, norms from power iteration.

#include <cmath>
#include <cstdint>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "entrolab/linalg.hpp"

namespace testkit {

using entrolab::Complex;
using entrolab::Matrix;

/// Seeded source of test matrices.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Matrix complex_matrix(Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = Complex(uniform(-1, 1), uniform(-1, 1));
    return m;
  }

  Matrix hermitian(Eigen::Index d) {
    const Matrix a = complex_matrix(d, d);
    return 0.5 * (a + a.adjoint());
  }

  Matrix unitary(Eigen::Index d) {
    Eigen::HouseholderQR<Matrix> qr(complex_matrix(d, d));
    return qr.householderQ() * Matrix::Identity(d, d);
  }

  /// Positive definite with spectrum in [lo, hi], unit trace if `normalize`.
  Matrix positive(Eigen::Index d, double lo = 0.05, double hi = 1.0, bool normalize = true) {
    Eigen::VectorXd ev(d);
    for (Eigen::Index i = 0; i < d; ++i) ev(i) = uniform(lo, hi);
    const Matrix u = unitary(d);
    Matrix p = u * ev.cast<Complex>().asDiagonal() * u.adjoint();
    p = 0.5 * (p + p.adjoint());
    if (normalize) p /= p.trace().real();
    return p;
  }

  entrolab::DensityOperator density(Eigen::Index d, double lo = 0.05, double hi = 1.0) {
    return entrolab::DensityOperator::from_matrix(positive(d, lo, hi));
  }

  entrolab::HermitianOperator herm(Eigen::Index d) { return entrolab::HermitianOperator::from_matrix(hermitian(d)); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline Matrix oracle_log(const Matrix& a) { return a.log(); }
inline Matrix oracle_exp(const Matrix& a) { return a.exp(); }
inline Matrix oracle_sqrt(const Matrix& a) { return a.sqrt(); }

/// Largest singular value by power iteration on A^dagger A.
inline double oracle_operator_norm(const Matrix& a, int iters = 3000) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += Complex(0.01 * double(i), 0.003 * double(i * i));
  v.normalize();
  double est = 0.0;
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXcd w = a.adjoint() * (a * v);
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    v = w / n;
    est = n;
  }
  return std::sqrt(est);
}

/// tr[f (log f - log g)] / tr f through the unsupported-module logarithm.
inline double oracle_relative_entropy(const Matrix& f, const Matrix& g) {
  return ((f * (oracle_log(f) - oracle_log(g))).trace().real()) / f.trace().real();
}

/// Kronecker product by explicit index arithmetic.
inline Matrix oracle_kron(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index p = 0; p < b.rows(); ++p)
        for (Eigen::Index q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return k;
}

/// T_g(f) = int_0^inf (g + t)^-1 f (g + t)^-1 dt after t = s / (1 - s),
/// by adaptive Simpson on [0, 1]. Slow; a third route for small cases.
inline Matrix oracle_tg_resolvent(const Matrix& g, const Matrix& f) {
  const Eigen::Index d = g.rows();
  const auto integrand = [&](double s) -> Matrix {
    if (s >= 1.0) return f;
    const double t = s / (1.0 - s);
    const Matrix r = (g + t * Matrix::Identity(d, d)).inverse();
    return (r * f * r) / ((1.0 - s) * (1.0 - s));
  };
  const int n = 4000;
  Matrix acc = integrand(0.0) + integrand(1.0);
  for (int k = 1; k < n; ++k) acc += (k % 2 == 1 ? 4.0 : 2.0) * integrand(double(k) / n);
  return acc / (3.0 * n);
}

}  // namespace testkit
