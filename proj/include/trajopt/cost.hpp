#ifndef TRAJOPT_COST_HPP
#define TRAJOPT_COST_HPP

#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "trajopt/basis.hpp"
#include "trajopt/error.hpp"
#include "trajopt/refstats.hpp"
#include "trajopt/trajectory.hpp"

namespace trajopt {

/// f(x) = xᵀ Q x + wᵀ x + r
struct QuadraticInstantaneousCost {
  Eigen::MatrixXd Q;
  Eigen::VectorXd w;
  double r = 0.0;

  double operator()(const Eigen::VectorXd& x) const { return x.dot(Q * x) + w.dot(x) + r; }
  Eigen::Index dimension_count() const { return Q.rows(); }
};

inline void validate(const QuadraticInstantaneousCost& f) {
  using detail::require;
  require(f.Q.rows() == f.Q.cols() && f.w.size() == f.Q.rows(), ErrorCode::invalid_argument,
          "quadratic cost has inconsistent sizes");
  require(f.Q.allFinite() && f.w.allFinite() && std::isfinite(f.r), ErrorCode::invalid_argument,
          "quadratic cost has non-finite entries");
  const double scale = std::max(1.0, f.Q.size() ? f.Q.cwiseAbs().maxCoeff() : 0.0);
  require(detail::max_asymmetry(f.Q) <= 1e-12 * scale, ErrorCode::invalid_argument,
          "quadratic cost matrix must be symmetric");
}

/// F̌(c) = cᵀ Q c + wᵀ c + constant on coefficient space.
struct AssembledQuadraticCost {
  Eigen::MatrixXd Q;
  Eigen::VectorXd w;
  double constant = 0.0;

  double operator()(const Eigen::VectorXd& c) const { return c.dot(Q * c) + w.dot(c) + constant; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& c) const { return 2.0 * Q * c + w; }
};

/// F̃(c̃₁) = c̃₁ᵀ Q c̃₁ + wᵀ c̃₁ + r, the restriction of F̌ to the feasible affine subspace.
struct ReducedQuadraticCost {
  Eigen::MatrixXd Q;
  Eigen::VectorXd w;
  double r = 0.0;

  double operator()(const Eigen::VectorXd& c) const { return c.dot(Q * c) + w.dot(c) + r; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& c) const { return 2.0 * Q * c + w; }
};

/// Affine field V(x) = M x + b and the cost F_α = α ∫‖ẏ‖² − ∫ V(y)ᵀ ẏ.
struct ForceFieldSpec {
  Eigen::MatrixXd M;
  Eigen::VectorXd b;
  double alpha = 0.0;

  Eigen::VectorXd field(const Eigen::VectorXd& x) const { return M * x + b; }
};

inline AssembledQuadraticCost assemble_quadratic(const QuadraticInstantaneousCost& f,
                                                 const BasisSpec& basis) {
  validate(f);
  const int D = basis.dimension_count();
  detail::require(f.dimension_count() == D, ErrorCode::invalid_argument,
                  "cost has " + std::to_string(f.dimension_count()) + " variables but the basis has " +
                      std::to_string(D));
  const int K = basis.total_size();
  AssembledQuadraticCost out{Eigen::MatrixXd::Zero(K, K), Eigen::VectorXd::Zero(K), f.r * basis.duration};
  // Shared orthonormal family: ∫φ_k φ_l = δ_kl, ∫φ_k = √T δ_k1.
  for (int d1 = 0; d1 < D; ++d1) {
    for (int d2 = 0; d2 < D; ++d2) {
      const int n = std::min(basis.dims[d1], basis.dims[d2]);
      for (int k = 0; k < n; ++k) out.Q(basis.offset(d1) + k, basis.offset(d2) + k) = f.Q(d1, d2);
    }
    out.w[basis.offset(d1)] = f.w[d1] * std::sqrt(basis.duration);
  }
  return out;
}

inline AssembledQuadraticCost assemble_forcefield(const ForceFieldSpec& field, const BasisSpec& basis) {
  using detail::require;
  const int D = basis.dimension_count();
  require(std::isfinite(field.alpha) && field.alpha >= 0.0, ErrorCode::invalid_argument,
          "trade-off alpha must be non-negative");
  require(field.M.rows() == D && field.M.cols() == D && field.b.size() == D,
          ErrorCode::invalid_argument, "force field does not match the basis dimension");
  require(field.M.allFinite() && field.b.allFinite(), ErrorCode::invalid_argument,
          "force field has non-finite entries");

  const int K = basis.total_size();
  const auto gram = gram_matrices(basis);
  // cross(k, l) = ∫ φ_k φ̇_l dt
  const Eigen::MatrixXd cross = gram.derivative.transpose();
  const Eigen::VectorXd phi0 = eval_basis(basis, 0.0);
  const Eigen::VectorXd phiT = eval_basis(basis, basis.duration);

  Eigen::MatrixXd work = Eigen::MatrixXd::Zero(K, K);
  AssembledQuadraticCost out{Eigen::MatrixXd::Zero(K, K), Eigen::VectorXd::Zero(K), 0.0};
  for (int d = 0; d < D; ++d) {
    const int od = basis.offset(d), kd = basis.dims[d];
    out.Q.block(od, od, kd, kd) += field.alpha * gram.stiffness.topLeftCorner(kd, kd);
    // W = Σ_{d,e} M_de ∫ y^(e) ẏ^(d) + Σ_d b_d ∫ ẏ^(d)
    for (int e = 0; e < D; ++e) {
      const int oe = basis.offset(e), ke = basis.dims[e];
      work.block(oe, od, ke, kd) += field.M(d, e) * cross.topLeftCorner(ke, kd);
    }
    out.w.segment(od, kd) = -field.b[d] * (phiT.head(kd) - phi0.head(kd));
  }
  out.Q -= 0.5 * (work + work.transpose());
  return out;
}

/// Quadrature evaluation of ∫ f(y(t)) dt for an arbitrary instantaneous cost.
inline double eval_cost_quadrature(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& c, const BasisSpec& basis, int nodes = 0) {
  if (nodes <= 0) nodes = basis.max_order() + 2;
  const auto rule = gauss_legendre_rule(nodes, basis.duration);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) acc += rule.weights[q] * f(evaluate(basis, c, rule.nodes[q]));
  return acc;
}

inline double eval_cost_quadrature(const QuadraticInstantaneousCost& f, const Eigen::VectorXd& c,
                                   const BasisSpec& basis, int nodes = 0) {
  return eval_cost_quadrature([&f](const Eigen::VectorXd& x) { return f(x); }, c, basis, nodes);
}

/// Quadrature evaluation of ∫ α‖ẏ‖² − V(y)ᵀẏ dt for an arbitrary field.
inline double eval_cost_quadrature(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& field,
                                   double alpha, const Eigen::VectorXd& c, const BasisSpec& basis,
                                   int nodes = 0) {
  if (nodes <= 0) nodes = basis.max_order() + 2;
  const auto rule = gauss_legendre_rule(nodes, basis.duration);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const Eigen::VectorXd y = evaluate(basis, c, rule.nodes[q]);
    const Eigen::VectorXd dy = evaluate_derivative(basis, c, rule.nodes[q]);
    acc += rule.weights[q] * (alpha * dy.squaredNorm() - field(y).dot(dy));
  }
  return acc;
}

inline double eval_cost_quadrature(const ForceFieldSpec& spec, const Eigen::VectorXd& c,
                                   const BasisSpec& basis, int nodes = 0) {
  return eval_cost_quadrature([&spec](const Eigen::VectorXd& x) -> Eigen::VectorXd { return spec.field(x); },
                              spec.alpha, c, basis, nodes);
}

/// Restriction of F̌ to the affine subspace where (c̃₂, c̃₃) are pinned.
inline ReducedQuadraticCost reduce_cost(const AssembledQuadraticCost& cost,
                                        const SubspaceDecomposition& dec) {
  detail::require(cost.Q.rows() == dec.size(), ErrorCode::invalid_argument,
                  "cost and decomposition sizes differ");
  detail::require(dec.sigma > 0, ErrorCode::degenerate_problem,
                  "covariance has rank zero: no free coordinates to optimise");
  const int s = dec.sigma;
  const auto rest = dec.size() - s;
  const Eigen::MatrixXd QV = dec.V.transpose() * cost.Q * dec.V;
  const Eigen::VectorXd wV = dec.V.transpose() * cost.w;
  const Eigen::VectorXd p = dec.pinned();
  ReducedQuadraticCost out;
  out.Q = QV.topLeftCorner(s, s);
  out.Q = 0.5 * (out.Q + out.Q.transpose()).eval();
  out.w = 2.0 * QV.topRightCorner(s, rest) * p + wV.head(s);
  out.r = p.dot(QV.bottomRightCorner(rest, rest) * p) + wV.tail(rest).dot(p) + cost.constant;
  return out;
}

struct QuadraticFit {
  QuadraticInstantaneousCost cost;
  double residual_std = 0.0;
  double rmse = 0.0;
  double mape = 0.0;  // percent, over non-zero targets
  Eigen::Index samples = 0;
  Eigen::Index parameters = 0;
};

inline Eigen::Index quadratic_feature_count(Eigen::Index D) { return 1 + D + D * (D + 1) / 2; }

/// Least-squares fit of a degree-2 polynomial in the state to observed
/// instantaneous costs. Features: 1, x_d, x_d x_e (d ≤ e), raw units.
inline QuadraticFit fit_quadratic_cost(const Eigen::MatrixXd& states, const Eigen::VectorXd& targets) {
  using detail::require;
  const auto n = states.rows();
  const auto D = states.cols();
  const auto p = quadratic_feature_count(D);
  require(targets.size() == n, ErrorCode::invalid_argument, "one target per state sample is required");
  require(n >= p, ErrorCode::insufficient_data,
          "quadratic fit needs at least " + std::to_string(p) + " samples, got " + std::to_string(n));
  require(states.allFinite() && targets.allFinite(), ErrorCode::invalid_argument,
          "fit data contains non-finite values");

  Eigen::MatrixXd X(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    X(i, j++) = 1.0;
    for (Eigen::Index d = 0; d < D; ++d) X(i, j++) = states(i, d);
    for (Eigen::Index d = 0; d < D; ++d)
      for (Eigen::Index e = d; e < D; ++e) X(i, j++) = states(i, d) * states(i, e);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-12);
  require(qr.rank() == p, ErrorCode::collinearity,
          "quadratic design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
              std::to_string(p) + ")");
  const Eigen::VectorXd beta = qr.solve(targets);

  QuadraticFit fit;
  fit.samples = n;
  fit.parameters = p;
  fit.cost.Q = Eigen::MatrixXd::Zero(D, D);
  fit.cost.w.resize(D);
  Eigen::Index j = 0;
  fit.cost.r = beta[j++];
  for (Eigen::Index d = 0; d < D; ++d) fit.cost.w[d] = beta[j++];
  for (Eigen::Index d = 0; d < D; ++d) {
    for (Eigen::Index e = d; e < D; ++e) {
      if (d == e) {
        fit.cost.Q(d, d) = beta[j++];
      } else {
        fit.cost.Q(d, e) = fit.cost.Q(e, d) = 0.5 * beta[j++];
      }
    }
  }
  const Eigen::VectorXd residual = targets - X * beta;
  fit.rmse = std::sqrt(residual.squaredNorm() / static_cast<double>(n));
  fit.residual_std = n > p ? std::sqrt(residual.squaredNorm() / static_cast<double>(n - p)) : 0.0;
  double ape = 0.0;
  Eigen::Index counted = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (targets[i] != 0.0) {
      ape += std::abs(residual[i] / targets[i]);
      ++counted;
    }
  }
  fit.mape = counted ? 100.0 * ape / static_cast<double>(counted) : 0.0;
  return fit;
}

}  // namespace trajopt

#endif  // TRAJOPT_COST_HPP
