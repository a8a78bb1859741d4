#pragma once
//
// Composite Gauss-Legendre quadrature over a symmetric window [-T, T] and
// the beta_0 weight
//
//   beta_0(t) = (pi/2) / (cosh(pi t) + 1),
//
// a probability density on the real line whose tails decay like
// 2 pi exp(-pi |t|).
//

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entrolab/errors.hpp"

namespace entrolab {

inline double beta0(double t) {
  return 0.5 * std::numbers::pi / (std::cosh(std::numbers::pi * t) + 1.0);
}

/// Exact mass of beta_0 outside [-T, T]: 1 - tanh(pi T / 2) = 2 / (exp(pi T) + 1).
inline double beta0_tail_mass(double truncation) {
  return 2.0 / (std::exp(std::numbers::pi * truncation) + 1.0);
}

struct QuadratureNode {
  double t;
  double weight;
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
inline std::vector<QuadratureNode> gauss_legendre(int n) {
  if (n < 1) throw InvalidInputError("Gauss-Legendre rule needs at least one node");
  std::vector<QuadratureNode> rule(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    } else {
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[static_cast<std::size_t>(i)] = {-x, w};
    rule[static_cast<std::size_t>(n - 1 - i)] = {x, w};
  }
  if (n % 2 == 1) rule[static_cast<std::size_t>(n / 2)].t = 0.0;
  return rule;
}

/// Integration window [-truncation, truncation] split into `panels` equal
/// panels with `nodes_per_panel` Gauss-Legendre nodes each. Nodes on the
/// negative half-line are exact mirrors of the positive ones.
struct QuadratureSpec {
  double truncation = 30.0;
  int panels = 60;
  int nodes_per_panel = 16;

  /// Rejects windows whose beta_0 tail mass exceeds 1e-12.
  void validate() const {
    if (!(truncation > 0.0) || !std::isfinite(truncation)) {
      throw InvalidInputError("quadrature truncation must be a positive real");
    }
    if (panels < 2 || panels % 2 != 0) {
      throw InvalidInputError("quadrature panel count must be a positive even integer");
    }
    if (nodes_per_panel < 1) throw InvalidInputError("quadrature needs at least one node per panel");
    if (std::exp(-std::numbers::pi * truncation) > 1e-12) {
      std::ostringstream os;
      os << "quadrature truncation " << truncation << " leaves beta0 tail mass "
         << beta0_tail_mass(truncation) << " (need exp(-pi T) <= 1e-12)";
      throw InvalidInputError(os.str());
    }
  }

  friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

inline void to_json(nlohmann::json& j, const QuadratureSpec& q) {
  j = nlohmann::json{{"T", q.truncation}, {"panels", q.panels}, {"nodes", q.nodes_per_panel}};
}

inline void from_json(const nlohmann::json& j, QuadratureSpec& q) {
  q.truncation = j.at("T").get<double>();
  q.panels = j.at("panels").get<int>();
  q.nodes_per_panel = j.at("nodes").get<int>();
}

/// Composite nodes on [-T, T], ascending in t.
inline std::vector<QuadratureNode> composite_nodes(const QuadratureSpec& spec) {
  spec.validate();
  const auto rule = gauss_legendre(spec.nodes_per_panel);
  const int half_panels = spec.panels / 2;
  const double h = spec.truncation / half_panels;
  std::vector<QuadratureNode> positive;
  positive.reserve(static_cast<std::size_t>(half_panels) * rule.size());
  for (int p = 0; p < half_panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (const auto& node : rule) positive.push_back({mid + 0.5 * h * node.t, 0.5 * h * node.weight});
  }
  std::vector<QuadratureNode> all;
  all.reserve(2 * positive.size());
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) all.push_back({-it->t, it->weight});
  all.insert(all.end(), positive.begin(), positive.end());
  return all;
}

template <class F>
auto integrate(const std::vector<QuadratureNode>& nodes, F&& f) {
  using R = decltype(f(0.0));
  R acc = f(nodes.front().t) * nodes.front().weight;
  for (std::size_t k = 1; k < nodes.size(); ++k) acc += f(nodes[k].t) * nodes[k].weight;
  return acc;
}

template <class F>
auto integrate(const QuadratureSpec& spec, F&& f) {
  return integrate(composite_nodes(spec), std::forward<F>(f));
}

}  // namespace entrolab
