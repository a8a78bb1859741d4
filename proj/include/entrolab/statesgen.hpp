#pragma once
//
// Seeded generation of states and observables. Every generator is a pure
// function of its arguments: the same (spec, seed) gives bitwise identical
// matrices. Uniform variates come from std::mt19937_64 (its output sequence
// is fixed by the standard); normals use an explicit Box-Muller transform
// rather than std::normal_distribution, whose algorithm is unspecified.
//

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include <json.hpp>

#include "entrolab/linalg.hpp"

namespace entrolab {

/// Smoothing weight applied to pure states before they enter the
/// full-rank verification pipeline.
inline constexpr double kPureSmoothing = 1e-6;

/// Deterministic complex Gaussian source.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in (0, 1]: 53 random bits.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard complex normal: real and imaginary parts N(0, 1/2).
  Complex complex_normal() {
    const double r = std::sqrt(-std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  Matrix ginibre(Eigen::Index rows, Eigen::Index cols) {
    Matrix g(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = complex_normal();
    return g;
  }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent sub-seeds from one seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(seed ^ mix_seed(stream));
}

/// rho = G G^dagger / tr[G G^dagger] with G a d x d Ginibre matrix.
inline DensityOperator ginibre_density(Eigen::Index d, std::uint64_t seed) {
  if (d < 1) throw DimensionError("ginibre_density: dimension must be positive");
  GaussianSource src(seed);
  const Matrix g = src.ginibre(d, d);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator::from(hermitize(rho));
}

/// Ginibre draw conditioned on numerical full rank: degenerate draws are
/// redrawn from the next sub-seed, and `redraws` counts them.
inline DensityOperator ginibre_full_rank(Eigen::Index d, std::uint64_t seed, int* redraws = nullptr) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto rho = ginibre_density(d, attempt == 0 ? seed : sub_seed(seed, 0x5eed0000ULL + attempt));
    if (is_positive_definite(eig_hermitian(rho))) return rho;
    if (redraws != nullptr) ++*redraws;
  }
}

/// Haar-random pure state vector (normalized complex Gaussian vector).
inline Eigen::VectorXcd random_pure_vector(Eigen::Index d, std::uint64_t seed) {
  GaussianSource src(seed);
  Eigen::VectorXcd v = src.ginibre(d, 1).col(0);
  return v / v.norm();
}

inline DensityOperator pure_state(const Eigen::VectorXcd& v) {
  const Eigen::VectorXcd u = v / v.norm();
  return DensityOperator::from(hermitize(u * u.adjoint()));
}

/// |Phi> = sum_i |i,i> / sqrt(d) for d x d.
inline Eigen::VectorXcd maximally_entangled_vector(Eigen::Index d) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

/// (1 - eps) rho + eps 1/d.
inline DensityOperator smooth(const DensityOperator& rho, double eps = kPureSmoothing) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidInputError("smoothing weight must lie in [0, 1]");
  const Eigen::Index d = rho.dim();
  return DensityOperator::from((1.0 - eps) * rho.op() +
                               (eps / static_cast<double>(d)) * HermitianOperator::identity(d));
}

/// (1 - eps) sigma_A (x) sigma_B + eps tau.
inline DensityOperator product_perturbed_sigma(const DensityOperator& sigma_a,
                                               const DensityOperator& sigma_b,
                                               const DensityOperator& tau, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidInputError("perturbation weight must lie in [0, 1]");
  if (tau.dim() != sigma_a.dim() * sigma_b.dim()) {
    throw DimensionError("product_perturbed_sigma: tau dimension must equal dim_a * dim_b");
  }
  const auto product = tensor(sigma_a.op(), sigma_b.op());
  if (eps == 0.0) return DensityOperator::from(product);
  if (eps == 1.0) return tau;
  return DensityOperator::from((1.0 - eps) * product + eps * tau.op());
}

/// Hermitian with operator norm exactly `norm_bound` (GUE shape, rescaled).
inline HermitianOperator random_observable(Eigen::Index d, std::uint64_t seed, double norm_bound = 1.0) {
  GaussianSource src(seed);
  const Matrix g = src.ginibre(d, d);
  const auto h = hermitize(g);
  const double n = operator_norm(h);
  if (n == 0.0) return HermitianOperator::zero(d);
  return (norm_bound / n) * h;
}

struct StatePair {
  DensityOperator rho;
  DensityOperator sigma;
};

/// Strictly positive probability vector (normalized squared Gaussian moduli).
inline RealVector random_probability_vector(Eigen::Index n, GaussianSource& src) {
  RealVector p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    do {
      p(i) = std::norm(src.complex_normal());
    } while (!(p(i) > 1e-12));
  }
  return p / p.sum();
}

/// Diagonal, full-rank, unit-trace pair in the computational product basis.
inline StatePair classical_diagonal_pair(const BipartiteDims& dims, std::uint64_t seed) {
  dims.validate();
  GaussianSource src(seed);
  const RealVector p = random_probability_vector(dims.total(), src);
  const RealVector q = random_probability_vector(dims.total(), src);
  return {DensityOperator::from(HermitianOperator::diagonal(p)),
          DensityOperator::from(HermitianOperator::diagonal(q))};
}

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

enum class EnsembleKind { ginibre_full_rank, product, product_perturbed, pure_smoothed, classical_diagonal };

inline const char* to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::ginibre_full_rank: return "ginibre_full_rank";
    case EnsembleKind::product: return "product";
    case EnsembleKind::product_perturbed: return "product_perturbed";
    case EnsembleKind::pure_smoothed: return "pure_smoothed";
    case EnsembleKind::classical_diagonal: return "classical_diagonal";
  }
  return "?";
}

inline std::optional<EnsembleKind> parse_ensemble_kind(const std::string& s) {
  for (auto k : {EnsembleKind::ginibre_full_rank, EnsembleKind::product, EnsembleKind::product_perturbed,
                 EnsembleKind::pure_smoothed, EnsembleKind::classical_diagonal}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

/// The reference state sigma_AB in each ensemble:
///   ginibre_full_rank   Ginibre on AB
///   product             sigma_A (x) sigma_B, each Ginibre
///   product_perturbed   (1 - epsilon) sigma_A (x) sigma_B + epsilon tau, tau Ginibre on AB
///   pure_smoothed       Haar pure state smoothed with weight 1e-6
///   classical_diagonal  diagonal pair (rho is diagonal too)
/// rho_AB is Ginibre on AB except in the classical case.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::ginibre_full_rank;
  BipartiteDims dims{2, 2};
  double epsilon = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    dims.validate();
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InvalidInputError("ensemble epsilon must lie in [0, 1]");
  }
};

inline void to_json(nlohmann::json& j, const EnsembleSpec& e) {
  j = nlohmann::json{{"kind", to_string(e.kind)},
                     {"dims", {e.dims.dim_a, e.dims.dim_b}},
                     {"epsilon", e.epsilon},
                     {"seed", e.seed}};
}

inline void from_json(const nlohmann::json& j, EnsembleSpec& e) {
  const auto kind = parse_ensemble_kind(j.at("kind").get<std::string>());
  if (!kind) throw ParseError("unknown ensemble kind");
  e.kind = *kind;
  e.dims = {j.at("dims").at(0).get<Eigen::Index>(), j.at("dims").at(1).get<Eigen::Index>()};
  e.epsilon = j.at("epsilon").get<double>();
  e.seed = j.at("seed").get<std::uint64_t>();
}

/// Per-trial seed: seed XOR trial index.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) { return seed ^ trial; }

struct TrialInputs {
  std::uint64_t seed = 0;  // per-trial seed
  DensityOperator rho;
  DensityOperator sigma;
  int redraws = 0;                 // degenerate Ginibre draws replaced
  double sigma_smoothing = 0.0;    // weight mixed into sigma, if any
};

namespace stream {
inline constexpr std::uint64_t rho = 1, sigma = 2, sigma_a = 3, sigma_b = 4, tau = 5, pure = 6,
                               classical = 7, observable = 8;
}

/// Draws trial `trial` of the ensemble. For product_perturbed, `tau`
/// replaces the Ginibre perturbation when given.
inline TrialInputs sample_trial(const EnsembleSpec& spec, std::uint64_t trial,
                                const std::optional<DensityOperator>& tau_override = std::nullopt) {
  spec.validate();
  const std::uint64_t s = trial_seed(spec.seed, trial);
  const Eigen::Index da = spec.dims.dim_a, db = spec.dims.dim_b, d = spec.dims.total();
  int redraws = 0;
  if (spec.kind == EnsembleKind::classical_diagonal) {
    auto pair = classical_diagonal_pair(spec.dims, sub_seed(s, stream::classical));
    return {s, std::move(pair.rho), std::move(pair.sigma), 0, 0.0};
  }
  auto rho = ginibre_full_rank(d, sub_seed(s, stream::rho), &redraws);
  switch (spec.kind) {
    case EnsembleKind::ginibre_full_rank: {
      auto sigma = ginibre_full_rank(d, sub_seed(s, stream::sigma), &redraws);
      return {s, std::move(rho), std::move(sigma), redraws, 0.0};
    }
    case EnsembleKind::product: {
      const auto a = ginibre_full_rank(da, sub_seed(s, stream::sigma_a), &redraws);
      const auto b = ginibre_full_rank(db, sub_seed(s, stream::sigma_b), &redraws);
      return {s, std::move(rho), tensor(a, b), redraws, 0.0};
    }
    case EnsembleKind::product_perturbed: {
      const auto a = ginibre_full_rank(da, sub_seed(s, stream::sigma_a), &redraws);
      const auto b = ginibre_full_rank(db, sub_seed(s, stream::sigma_b), &redraws);
      if (tau_override) {
        return {s, std::move(rho), product_perturbed_sigma(a, b, *tau_override, spec.epsilon), redraws, 0.0};
      }
      const auto tau = ginibre_full_rank(d, sub_seed(s, stream::tau), &redraws);
      return {s, std::move(rho), product_perturbed_sigma(a, b, tau, spec.epsilon), redraws, 0.0};
    }
    case EnsembleKind::pure_smoothed: {
      const auto psi = pure_state(random_pure_vector(d, sub_seed(s, stream::pure)));
      return {s, std::move(rho), smooth(psi, kPureSmoothing), redraws, kPureSmoothing};
    }
    case EnsembleKind::classical_diagonal: break;
  }
  throw InvalidInputError("unhandled ensemble kind");
}

}  // namespace entrolab
