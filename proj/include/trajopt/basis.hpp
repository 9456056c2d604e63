#ifndef TRAJOPT_BASIS_HPP
#define TRAJOPT_BASIS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trajopt/error.hpp"

namespace trajopt {

enum class BasisKind { legendre };

inline std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::legendre: return "legendre";
  }
  return "unknown";
}

/// Orthonormal function family on [0, T] with a per-dimension truncation.
/// Every dimension uses the first `dims[d]` members of the same family.
struct BasisSpec {
  BasisKind kind = BasisKind::legendre;
  double duration = 1.0;
  std::vector<int> dims;

  int dimension_count() const { return static_cast<int>(dims.size()); }
  int total_size() const { return std::accumulate(dims.begin(), dims.end(), 0); }
  int max_order() const { return dims.empty() ? 0 : *std::max_element(dims.begin(), dims.end()); }

  /// Index of the first coefficient of dimension `d` in the stacked vector.
  int offset(int d) const {
    return std::accumulate(dims.begin(), dims.begin() + d, 0);
  }

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;  // exact for polynomials up to this degree

  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// Gram-type integrals of the K_max basis functions:
///   mass(k,l)       = ∫ φ_k φ_l dt
///   derivative(k,l) = ∫ φ̇_k φ_l dt
///   stiffness(k,l)  = ∫ φ̇_k φ̇_l dt
struct GramMatrices {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd derivative;
  Eigen::MatrixXd stiffness;
};

inline BasisSpec build_basis(BasisKind kind, std::vector<int> dims, double duration) {
  using detail::require;
  require(std::isfinite(duration) && duration > 0.0, ErrorCode::invalid_argument,
          "basis interval end must be positive, got " + std::to_string(duration));
  require(!dims.empty(), ErrorCode::invalid_argument, "basis needs at least one dimension");
  for (std::size_t d = 0; d < dims.size(); ++d) {
    require(dims[d] >= 1, ErrorCode::invalid_argument,
            "basis dimension " + std::to_string(d) + " must have at least one function");
  }
  return BasisSpec{kind, duration, std::move(dims)};
}

namespace detail {

inline double check_time(const BasisSpec& spec, double t) {
  const double slack = 1e-12 * std::max(1.0, spec.duration);
  require(std::isfinite(t) && t >= -slack && t <= spec.duration + slack, ErrorCode::out_of_domain,
          "time " + std::to_string(t) + " outside [0, " + std::to_string(spec.duration) + "]");
  return std::clamp(t, 0.0, spec.duration);
}

// Classical Legendre values P_0..P_{n-1} and derivatives at x in [-1, 1].
inline void legendre_values(int n, double x, double* p, double* dp) {
  if (n <= 0) return;
  p[0] = 1.0;
  if (dp) dp[0] = 0.0;
  if (n == 1) return;
  p[1] = x;
  if (dp) dp[1] = 1.0;
  for (int j = 1; j + 1 < n; ++j) {
    p[j + 1] = ((2.0 * j + 1.0) * x * p[j] - j * p[j - 1]) / (j + 1.0);
    if (dp) dp[j + 1] = dp[j - 1] + (2.0 * j + 1.0) * p[j];
  }
}

}  // namespace detail

/// φ_k(t) = sqrt((2k-1)/T) P_{k-1}(2t/T - 1), k = 1..K_max.
inline Eigen::VectorXd eval_basis(const BasisSpec& spec, double t) {
  t = detail::check_time(spec, t);
  const int n = spec.max_order();
  Eigen::VectorXd out(n);
  detail::legendre_values(n, 2.0 * t / spec.duration - 1.0, out.data(), nullptr);
  for (int k = 0; k < n; ++k) out[k] *= std::sqrt((2.0 * k + 1.0) / spec.duration);
  return out;
}

inline Eigen::VectorXd eval_basis_derivative(const BasisSpec& spec, double t) {
  t = detail::check_time(spec, t);
  const int n = spec.max_order();
  std::vector<double> p(n);
  Eigen::VectorXd out(n);
  detail::legendre_values(n, 2.0 * t / spec.duration - 1.0, p.data(), out.data());
  const double chain = 2.0 / spec.duration;
  for (int k = 0; k < n; ++k) out[k] *= chain * std::sqrt((2.0 * k + 1.0) / spec.duration);
  return out;
}

/// Rows are times, columns are basis functions.
inline Eigen::MatrixXd eval_basis_matrix(const BasisSpec& spec, std::span<const double> times,
                                         bool derivative = false) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(times.size()), spec.max_order());
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        derivative ? eval_basis_derivative(spec, times[i]).transpose()
                   : eval_basis(spec, times[i]).transpose();
  }
  return out;
}

/// n-point Gauss-Legendre rule on [0, T], nodes ascending.
inline QuadratureRule gauss_legendre_rule(int n, double duration) {
  detail::require(n >= 1, ErrorCode::invalid_argument, "quadrature needs at least one node");
  detail::require(std::isfinite(duration) && duration > 0.0, ErrorCode::invalid_argument,
                  "quadrature interval end must be positive");
  QuadratureRule rule;
  rule.order = 2 * n - 1;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  std::vector<double> p(n + 1), dp(n + 1);
  for (int i = 0; i < n; ++i) {
    // Roots come out descending in x; store them mirrored so nodes ascend.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      detail::legendre_values(n + 1, x, p.data(), dp.data());
      const double dx = p[n] / dp[n];
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    detail::legendre_values(n + 1, x, p.data(), dp.data());
    const double w = 2.0 / ((1.0 - x * x) * dp[n] * dp[n]);
    rule.nodes[n - 1 - i] = 0.5 * (x + 1.0) * duration;
    rule.weights[n - 1 - i] = 0.5 * w * duration;
  }
  return rule;
}

/// Smallest node count whose rule is exact for products of two members of the
/// truncated family (degree 2 K_max).
inline int default_quadrature_nodes(int max_order) { return max_order + 1; }

inline GramMatrices gram_matrices(const BasisSpec& spec) {
  const int n = spec.max_order();
  const auto rule = gauss_legendre_rule(default_quadrature_nodes(n), spec.duration);
  GramMatrices g{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n),
                 Eigen::MatrixXd::Zero(n, n)};
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const Eigen::VectorXd phi = eval_basis(spec, rule.nodes[q]);
    const Eigen::VectorXd dphi = eval_basis_derivative(spec, rule.nodes[q]);
    const double w = rule.weights[q];
    g.mass.noalias() += w * phi * phi.transpose();
    g.derivative.noalias() += w * dphi * phi.transpose();
    g.stiffness.noalias() += w * dphi * dphi.transpose();
  }
  return g;
}

}  // namespace trajopt

#endif  // TRAJOPT_BASIS_HPP
