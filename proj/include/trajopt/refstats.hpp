#ifndef TRAJOPT_REFSTATS_HPP
#define TRAJOPT_REFSTATS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trajopt/error.hpp"
#include "trajopt/trajectory.hpp"

namespace trajopt {

/// Reference coefficient vectors, one per column, with positive weights
/// summing to one.
struct ReferenceSet {
  BasisSpec basis;
  Eigen::MatrixXd coefficients;  // K x I
  Eigen::VectorXd weights;       // I
  std::vector<double> costs;     // optional, one per reference
  std::vector<std::string> names;

  Eigen::Index size() const { return coefficients.cols(); }

  Eigen::VectorXd weighted_mean() const { return coefficients * weights; }

  ReferenceSet subset(std::span<const std::size_t> indices) const {
    ReferenceSet out;
    out.basis = basis;
    out.coefficients.resize(coefficients.rows(), static_cast<Eigen::Index>(indices.size()));
    out.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(indices.size()),
                                            1.0 / static_cast<double>(std::max<std::size_t>(1, indices.size())));
    for (std::size_t j = 0; j < indices.size(); ++j) {
      out.coefficients.col(static_cast<Eigen::Index>(j)) = coefficients.col(static_cast<Eigen::Index>(indices[j]));
      if (!costs.empty()) out.costs.push_back(costs[indices[j]]);
      if (!names.empty()) out.names.push_back(names[indices[j]]);
    }
    return out;
  }
};

inline void validate(const ReferenceSet& refs) {
  using detail::require;
  require(refs.coefficients.rows() == refs.basis.total_size(), ErrorCode::invalid_argument,
          "reference vectors do not match the basis size");
  require(refs.weights.size() == refs.coefficients.cols(), ErrorCode::invalid_argument,
          "one weight per reference is required");
  require((refs.weights.array() > 0.0).all(), ErrorCode::invalid_argument,
          "reference weights must be positive");
  require(std::abs(refs.weights.sum() - 1.0) <= 1e-12, ErrorCode::invalid_argument,
          "reference weights must sum to one");
}

enum class WeightScheme { uniform, inverse_cost_rank, user };

/// Normalised reference weights. `inverse_cost_rank` gives the cheapest
/// reference rank 1 and weight proportional to 1/rank.
inline Eigen::VectorXd compute_weights(std::size_t count, WeightScheme scheme,
                                       std::span<const double> costs = {},
                                       std::span<const double> user = {}) {
  using detail::require;
  require(count >= 1, ErrorCode::invalid_argument, "weights need at least one reference");
  const auto n = static_cast<Eigen::Index>(count);
  Eigen::VectorXd w(n);
  switch (scheme) {
    case WeightScheme::uniform:
      w.setConstant(1.0);
      break;
    case WeightScheme::inverse_cost_rank: {
      require(costs.size() == count, ErrorCode::invalid_argument, "one cost per reference is required");
      for (double c : costs) require(std::isfinite(c), ErrorCode::invalid_argument, "non-finite reference cost");
      std::vector<std::size_t> order(count);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
      for (std::size_t r = 0; r < count; ++r) w[static_cast<Eigen::Index>(order[r])] = 1.0 / static_cast<double>(r + 1);
      break;
    }
    case WeightScheme::user:
      require(user.size() == count, ErrorCode::invalid_argument, "one user weight per reference is required");
      for (std::size_t i = 0; i < count; ++i) {
        require(std::isfinite(user[i]) && user[i] > 0.0, ErrorCode::invalid_argument,
                "user weight " + std::to_string(i) + " must be positive");
        w[static_cast<Eigen::Index>(i)] = user[i];
      }
      break;
  }
  return w / w.sum();
}

namespace detail {

/// Eigenpairs of a symmetric matrix, eigenvalues descending. Each eigenvector
/// is signed so that its largest-magnitude entry is positive.
struct SortedEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

inline void canonical_sign(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) > best + 1e-12) {
        best = std::abs(vectors(i, j));
        arg = i;
      }
    }
    if (vectors(arg, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

inline SortedEigen sorted_eigen(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  require(es.info() == Eigen::Success, ErrorCode::numerical, "symmetric eigensolver failed");
  SortedEigen out{es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
  canonical_sign(out.vectors);
  return out;
}

inline int count_above(const Eigen::VectorXd& descending, double rtol) {
  if (descending.size() == 0 || !(descending[0] > 0.0)) return 0;
  const double threshold = rtol * descending[0];
  int n = 0;
  while (n < descending.size() && descending[n] > threshold) ++n;
  return n;
}

inline double max_asymmetry(const Eigen::MatrixXd& m) {
  return m.rows() == 0 ? 0.0 : (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Empirical covariance of the reference vectors (denominator I-1), with
/// optional shrinkage toward (tr Σ / K) I.
struct CovarianceModel {
  Eigen::MatrixXd matrix;
  int rank = 0;
  double rank_rtol = 1e-10;
};

inline CovarianceModel estimate_covariance(const Eigen::MatrixXd& coefficients, double shrinkage = 0.0,
                                           double rank_rtol = 1e-10) {
  using detail::require;
  require(coefficients.cols() >= 2, ErrorCode::insufficient_data,
          "covariance estimation needs at least two references, got " +
              std::to_string(coefficients.cols()));
  require(shrinkage >= 0.0 && shrinkage <= 1.0, ErrorCode::invalid_argument,
          "shrinkage must lie in [0, 1]");
  const Eigen::VectorXd mean = coefficients.rowwise().mean();
  const Eigen::MatrixXd centered = coefficients.colwise() - mean;
  Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(coefficients.cols() - 1);
  if (shrinkage > 0.0) {
    const auto K = cov.rows();
    const double target = cov.trace() / static_cast<double>(K);
    cov = (1.0 - shrinkage) * cov +
          shrinkage * target * Eigen::MatrixXd::Identity(K, K);
  }
  cov = 0.5 * (cov + cov.transpose()).eval();
  CovarianceModel model{cov, 0, rank_rtol};
  model.rank = detail::count_above(detail::sorted_eigen(cov).values, rank_rtol);
  return model;
}

/// Indices of rows of `A` that are linearly dependent on the rows before them.
inline std::vector<Eigen::Index> dependent_rows(const Eigen::MatrixXd& A, double rtol = 1e-10) {
  std::vector<Eigen::Index> out;
  std::vector<Eigen::VectorXd> basis;
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    Eigen::VectorXd v = A.row(r).transpose();
    const double norm = v.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) v -= q.dot(v) * q;
    if (norm == 0.0 || v.norm() <= rtol * norm) {
      out.push_back(r);
    } else {
      basis.push_back(v.normalized());
    }
  }
  return out;
}

namespace detail {

inline void require_full_row_rank(const Eigen::MatrixXd& A, const std::vector<std::string>& labels = {}) {
  const auto dep = dependent_rows(A);
  if (dep.empty()) return;
  std::string rows;
  for (auto r : dep) {
    if (!rows.empty()) rows += ", ";
    rows += (static_cast<std::size_t>(r) < labels.size()) ? labels[static_cast<std::size_t>(r)] : std::to_string(r);
  }
  fail(ErrorCode::rank_deficient,
       "endpoint matrix is not full row rank; dependent rows: " + rows);
}

}  // namespace detail

/// ‖Σ AᵀA‖_F / (‖Σ‖_F ‖AᵀA‖_F); zero when either factor vanishes.
inline double commutation_residual(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& A) {
  const Eigen::MatrixXd ata = A.transpose() * A;
  const double scale = sigma.norm() * ata.norm();
  if (scale == 0.0) return 0.0;
  return (sigma * ata).norm() / scale;
}

/// Orthogonal projector onto ker A (A must have full row rank).
inline Eigen::MatrixXd kernel_projector(const Eigen::MatrixXd& A,
                                        const std::vector<std::string>& labels = {}) {
  const auto K = A.cols();
  if (A.rows() == 0) return Eigen::MatrixXd::Identity(K, K);
  detail::require_full_row_rank(A, labels);
  const Eigen::MatrixXd gram = A * A.transpose();
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(K, K) - A.transpose() * gram.ldlt().solve(A);
  return 0.5 * (P + P.transpose());
}

/// Σ' = P Σ P with P the projector onto ker A.
inline Eigen::MatrixXd project_to_kernel(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& A,
                                         const std::vector<std::string>& labels = {}) {
  detail::require(sigma.rows() == sigma.cols() && sigma.rows() == A.cols(),
                  ErrorCode::invalid_argument, "covariance and endpoint matrix sizes differ");
  const Eigen::MatrixXd P = kernel_projector(A, labels);
  const Eigen::MatrixXd out = P * sigma * P;
  return 0.5 * (out + out.transpose());
}

/// Moore-Penrose pseudoinverse of a symmetric matrix; eigenvalues at or
/// below rank_rtol * λ_max are treated as zero.
inline Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& sigma, double rank_rtol = 1e-10) {
  detail::require(sigma.rows() == sigma.cols(), ErrorCode::invalid_argument, "matrix must be square");
  const double scale = std::max(1.0, sigma.rows() ? sigma.cwiseAbs().maxCoeff() : 0.0);
  detail::require(detail::max_asymmetry(sigma) <= 1e-10 * scale, ErrorCode::invalid_argument,
                  "pseudoinverse requires a symmetric matrix");
  const auto eig = detail::sorted_eigen(0.5 * (sigma + sigma.transpose()));
  const int r = detail::count_above(eig.values, rank_rtol);
  const Eigen::MatrixXd Vr = eig.vectors.leftCols(r);
  return Vr * eig.values.head(r).cwiseInverse().asDiagonal() * Vr.transpose();
}

/// Orthogonal split R^K = span V₁ ⊕ span V₂ ⊕ span V₃ where V₁ spans im Σ',
/// V₃ spans im AᵀA and V₂ is the remainder, together with the pinned
/// coordinates of every feasible vector on V₂ and V₃.
struct SubspaceDecomposition {
  Eigen::MatrixXd V;
  int sigma = 0;  // rank of the covariance
  int a = 0;      // rank of AᵀA
  Eigen::VectorXd lambda;    // Λ_{Σ,1}, descending, positive
  Eigen::VectorXd singular;  // diagonal of S_{A,2}
  Eigen::MatrixXd U;         // A = U S_A Vᵀ
  Eigen::VectorXd pinned2;   // c̃₂
  Eigen::VectorXd pinned3;   // c̃₃ = S_{A,2}^{-1} Uᵀ Γ
  double pinned2_spread = 0.0;
  double commutation_residual = 0.0;

  Eigen::Index size() const { return V.rows(); }
  int free_size() const { return sigma; }
  int middle_size() const { return static_cast<int>(V.cols()) - sigma - a; }

  auto V1() const { return V.leftCols(sigma); }
  auto V2() const { return V.middleCols(sigma, middle_size()); }
  auto V3() const { return V.rightCols(a); }

  Eigen::VectorXd pinned() const {
    Eigen::VectorXd out(pinned2.size() + pinned3.size());
    out << pinned2, pinned3;
    return out;
  }

  Eigen::VectorXd reduce(const Eigen::VectorXd& c) const { return V1().transpose() * c; }

  /// c = V (c̃₁; c̃₂; c̃₃)
  Eigen::VectorXd lift(const Eigen::VectorXd& free) const {
    detail::require(free.size() == sigma, ErrorCode::invalid_argument,
                    "reduced vector has the wrong length");
    Eigen::VectorXd full(V.cols());
    full << free, pinned2, pinned3;
    return V * full;
  }
};

/// Simultaneous diagonalisation of a covariance supported on ker A and AᵀA.
/// `references` (K x I) pin c̃₂ to the mean of V₂ᵀ c_Rᵢ.
inline SubspaceDecomposition decompose(const Eigen::MatrixXd& sigma, const EndpointSystem& sys,
                                       const Eigen::MatrixXd& references, double rank_rtol = 1e-10,
                                       double commutation_tol = 1e-8) {
  using detail::require;
  const auto K = sigma.rows();
  require(sigma.cols() == K && sys.A.cols() == K, ErrorCode::invalid_argument,
          "covariance and endpoint matrix sizes differ");
  require(references.rows() == K || references.cols() == 0, ErrorCode::invalid_argument,
          "reference vectors have the wrong length");
  const Eigen::MatrixXd& A = sys.A;
  const Eigen::MatrixXd ata = A.transpose() * A;

  SubspaceDecomposition out;
  out.commutation_residual = commutation_residual(sigma, A);
  require(out.commutation_residual <= commutation_tol, ErrorCode::model_mismatch,
          "covariance does not annihilate AᵀA (relative residual " +
              std::to_string(out.commutation_residual) + "); project it onto ker A first");
  detail::require_full_row_rank(A, sys.row_labels);

  // Eigenvectors of AᵀA split R^K into im Aᵀ (V₃) and ker A; the covariance
  // is then diagonalised inside ker A so that A V₁ = A V₂ = 0 to rounding.
  const auto ea = detail::sorted_eigen(ata);
  out.a = detail::count_above(ea.values, 1e-12);
  require(out.a == A.rows(), ErrorCode::rank_deficient,
          "AᵀA has rank " + std::to_string(out.a) + ", expected " + std::to_string(A.rows()));
  const Eigen::MatrixXd N = ea.vectors.rightCols(K - out.a);
  const auto es = detail::sorted_eigen(N.transpose() * (0.5 * (sigma + sigma.transpose())) * N);
  out.sigma = detail::count_above(es.values, rank_rtol);
  out.lambda = es.values.head(out.sigma);

  const int mid = static_cast<int>(K) - out.sigma - out.a;
  Eigen::MatrixXd V(K, K);
  Eigen::MatrixXd V1 = N * es.vectors.leftCols(out.sigma);
  Eigen::MatrixXd V2 = N * es.vectors.rightCols(mid);
  Eigen::MatrixXd V3 = ea.vectors.leftCols(out.a);
  detail::canonical_sign(V1);
  detail::canonical_sign(V2);
  detail::canonical_sign(V3);
  V.leftCols(out.sigma) = V1;
  V.middleCols(out.sigma, mid) = V2;
  V.rightCols(out.a) = V3;
  out.V = std::move(V);

  out.singular = ea.values.head(out.a).cwiseSqrt();
  out.U = A * out.V3() * out.singular.cwiseInverse().asDiagonal();
  out.pinned3 = out.singular.cwiseInverse().asDiagonal() * (out.U.transpose() * sys.gamma);

  out.pinned2 = Eigen::VectorXd::Zero(mid);
  if (mid > 0 && references.cols() > 0) {
    const Eigen::MatrixXd proj = out.V2().transpose() * references;
    out.pinned2 = proj.rowwise().mean();
    out.pinned2_spread = (proj.colwise() - out.pinned2).cwiseAbs().maxCoeff();
  }
  return out;
}

}  // namespace trajopt

#endif  // TRAJOPT_REFSTATS_HPP
