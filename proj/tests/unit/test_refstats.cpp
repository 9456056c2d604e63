#include <random>

#include <gtest/gtest.h>

#include "trajopt/datagen.hpp"
#include "trajopt/refstats.hpp"
#include "test_helpers.hpp"

using namespace trajopt;
using testing_helpers::code_of;
using testing_helpers::expect_matrix_near;
using testing_helpers::random_matrix;
using testing_helpers::random_vector;

namespace {

EndpointSystem system_from(const Eigen::MatrixXd& A, const Eigen::VectorXd& gamma) {
  return EndpointSystem{A, gamma, Eigen::VectorXd::Zero(gamma.size()), {}};
}

// Random covariance of rank `rank` supported on ker A.
Eigen::MatrixXd kernel_covariance(std::mt19937_64& rng, const Eigen::MatrixXd& A, int rank) {
  const Eigen::MatrixXd G = random_matrix(rng, A.cols(), rank);
  return project_to_kernel(G * G.transpose(), A);
}

}  // namespace

TEST(Weights, Schemes) {
  EXPECT_LE((compute_weights(5, WeightScheme::uniform).array() - 0.2).abs().maxCoeff(), 1e-15);
  const std::vector<double> user{2.0, 2.0};
  EXPECT_LE((compute_weights(2, WeightScheme::user, {}, user).array() - 0.5).abs().maxCoeff(), 1e-15);
  const std::vector<double> costs{20.0, 10.0, 30.0};
  const Eigen::VectorXd w = compute_weights(3, WeightScheme::inverse_cost_rank, costs);
  EXPECT_NEAR(w[1], 0.54545454545454541, 1e-15);
  EXPECT_NEAR(w[0], 0.27272727272727271, 1e-15);
  EXPECT_NEAR(w[2], 0.18181818181818182, 1e-15);
}

TEST(Weights, RejectsBadInput) {
  const std::vector<double> bad{1.0, -1.0};
  EXPECT_EQ(code_of([&] { compute_weights(2, WeightScheme::user, {}, bad); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { compute_weights(0, WeightScheme::uniform); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { compute_weights(2, WeightScheme::inverse_cost_rank); }), ErrorCode::invalid_argument);
}

TEST(Covariance, TwoReferences) {
  const Eigen::Matrix2d refs = (Eigen::Matrix2d() << 0, 2, 0, 0).finished();
  const auto cov = estimate_covariance(refs);
  expect_matrix_near(cov.matrix, (Eigen::Matrix2d() << 2, 0, 0, 0).finished(), 1e-15);
  EXPECT_EQ(cov.rank, 1);
}

TEST(Covariance, FixedSampleAndShrinkage) {
  Eigen::MatrixXd X(4, 3);
  X << 1.0, 2.0, 0.5, 0.0, 1.0, -1.0, 3.0, 1.0, 2.0, 2.0, -1.0, 0.0;
  Eigen::Matrix3d S, shrunk;
  S << 1.6666666666666665, -0.5, 1.4166666666666665, -0.5, 1.5833333333333333, 0.29166666666666663,
      1.4166666666666665, 0.29166666666666663, 1.5625;
  shrunk << 1.6479166666666665, -0.35, 0.99166666666666647, -0.35, 1.5895833333333331, 0.20416666666666664,
      0.99166666666666647, 0.20416666666666664, 1.575;
  expect_matrix_near(estimate_covariance(X.transpose()).matrix, S, 1e-14);
  expect_matrix_near(estimate_covariance(X.transpose(), 0.3).matrix, shrunk, 1e-14);
  const auto full = estimate_covariance(X.transpose(), 1.0);
  expect_matrix_near(full.matrix, S.trace() / 3.0 * Eigen::Matrix3d::Identity(), 1e-14);
  EXPECT_EQ(full.rank, 3);
}

TEST(Covariance, IdenticalReferencesHaveRankZero) {
  const Eigen::MatrixXd refs = Eigen::Vector3d(1, 2, 3).replicate(1, 4);
  const auto cov = estimate_covariance(refs);
  EXPECT_EQ(cov.matrix.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(cov.rank, 0);
  EXPECT_EQ(code_of([] { estimate_covariance(Eigen::MatrixXd::Zero(3, 1)); }), ErrorCode::insufficient_data);
}

TEST(KernelProjection, HandExamples) {
  const Eigen::RowVector2d A(0, 1);
  expect_matrix_near(project_to_kernel(Eigen::Matrix2d::Identity(), A), (Eigen::Matrix2d() << 1, 0, 0, 0).finished(),
                     1e-15);
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd B = random_matrix(rng, 2, 5);
  const Eigen::MatrixXd sigma = kernel_covariance(rng, B, 3);
  expect_matrix_near(project_to_kernel(sigma, B), sigma, 1e-12);
  const Eigen::MatrixXd noisy = sigma + 0.1 * random_matrix(rng, 5, 5);
  const Eigen::MatrixXd projected = project_to_kernel(0.5 * (noisy + noisy.transpose()), B);
  EXPECT_LE((projected * B.transpose() * B).norm(), 1e-10);
}

TEST(Pseudoinverse, Cases) {
  expect_matrix_near(pseudoinverse(Eigen::Vector2d(4, 0).asDiagonal().toDenseMatrix()),
                     Eigen::Vector2d(0.25, 0).asDiagonal().toDenseMatrix(), 1e-15);
  expect_matrix_near(pseudoinverse(Eigen::Matrix3d::Identity()), Eigen::Matrix3d::Identity(), 1e-15);
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd G = random_matrix(rng, 4, 2);
  const Eigen::MatrixXd S = G * G.transpose();
  const Eigen::MatrixXd P = pseudoinverse(S);
  EXPECT_LE((S * P * S - S).norm(), 1e-9);
  EXPECT_LE((P * S * P - P).norm(), 1e-9);
}

TEST(Decompose, TwoByTwoHandExample) {
  const Eigen::RowVector2d A(0, 1);
  const auto dec = decompose(Eigen::Vector2d(1, 0).asDiagonal().toDenseMatrix(), system_from(A, Eigen::VectorXd::Constant(1, 3.0)),
                             Eigen::MatrixXd(2, 0));
  EXPECT_EQ(dec.sigma, 1);
  EXPECT_EQ(dec.a, 1);
  expect_matrix_near(dec.V, Eigen::Matrix2d::Identity(), 1e-15);
  EXPECT_NEAR(dec.lambda[0], 1.0, 1e-15);
  EXPECT_NEAR(dec.singular[0], 1.0, 1e-15);
  // Lifting pins the constrained coordinate to Γ.
  const Eigen::VectorXd c = dec.lift(Eigen::VectorXd::Constant(1, -4.0));
  EXPECT_NEAR(c[0], -4.0, 1e-15);
  EXPECT_NEAR(c[1], 3.0, 1e-15);
}

TEST(Decompose, ThreeByThreeWithoutMiddleBlock) {
  const Eigen::RowVector3d A(0, 0, 1);
  const auto dec = decompose(Eigen::Vector3d(2, 1, 0).asDiagonal().toDenseMatrix(),
                             system_from(A, Eigen::VectorXd::Constant(1, 5.0)), Eigen::MatrixXd(3, 0));
  EXPECT_EQ(dec.sigma, 2);
  EXPECT_EQ(dec.a, 1);
  EXPECT_EQ(dec.middle_size(), 0);
  EXPECT_NEAR(dec.lambda[0], 2.0, 1e-15);
  EXPECT_NEAR(dec.lambda[1], 1.0, 1e-15);
  EXPECT_NEAR(dec.pinned3[0], 5.0, 1e-15);
}

TEST(Decompose, RandomCommutingPairsReconstruct) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int K = 6 + trial % 9;
    const int rows = 2 + trial % 3;
    const Eigen::MatrixXd A = random_matrix(rng, rows, K);
    const int rank = 1 + trial % (K - rows);
    const Eigen::MatrixXd sigma = kernel_covariance(rng, A, rank);
    const Eigen::MatrixXd refs = random_matrix(rng, K, 4);
    const auto dec = decompose(sigma, system_from(A, random_vector(rng, rows)), refs);
    EXPECT_EQ(dec.sigma, rank);
    EXPECT_EQ(dec.a, rows);
    EXPECT_LE(dec.sigma + dec.a, K);
    EXPECT_LE((dec.V.transpose() * dec.V - Eigen::MatrixXd::Identity(K, K)).norm(), 1e-10);
    Eigen::VectorXd ls = Eigen::VectorXd::Zero(K), la = Eigen::VectorXd::Zero(K);
    ls.head(dec.sigma) = dec.lambda;
    la.tail(dec.a) = dec.singular.cwiseAbs2();
    EXPECT_LE((dec.V * ls.asDiagonal() * dec.V.transpose() - sigma).norm(), 1e-8);
    EXPECT_LE((dec.V * la.asDiagonal() * dec.V.transpose() - A.transpose() * A).norm(), 1e-8);
  }
}

TEST(Decompose, FeasibleSubspaceMembershipMatchesEndpointSystem) {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd A = random_matrix(rng, 3, 9);
  const Eigen::VectorXd gamma = random_vector(rng, 3);
  const auto dec = decompose(kernel_covariance(rng, A, 4), system_from(A, gamma), random_matrix(rng, 9, 3));
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd c = dec.lift(random_vector(rng, dec.sigma));
    EXPECT_LE((A * c - gamma).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((dec.reduce(c) - dec.V1().transpose() * c).norm(), 1e-12);
  }
  const Eigen::VectorXd z = random_vector(rng, dec.sigma);
  EXPECT_LE((dec.reduce(dec.lift(z)) - z).norm(), 1e-12);
}

TEST(Decompose, PenaltyEquivalenceWithPseudoinverseForm) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd A = random_matrix(rng, 2, 8);
    const Eigen::MatrixXd sigma = kernel_covariance(rng, A, 4);
    const Eigen::VectorXd gamma = random_vector(rng, 2);
    // References inside 𝒱₁ built from a common pinned part.
    const Eigen::VectorXd base = A.completeOrthogonalDecomposition().solve(gamma);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    const Eigen::MatrixXd range = es.eigenvectors().rightCols(4);
    Eigen::MatrixXd refs(8, 5);
    for (int i = 0; i < 5; ++i) refs.col(i) = base + range * random_vector(rng, 4);
    const auto dec = decompose(sigma, system_from(A, gamma), refs);
    const Eigen::VectorXd w = compute_weights(5, WeightScheme::uniform);
    const Eigen::MatrixXd pinv = pseudoinverse(sigma);
    const Eigen::VectorXd c = dec.lift(random_vector(rng, dec.sigma));
    double reduced = 0.0, full = 0.0;
    for (int i = 0; i < 5; ++i) {
      const Eigen::VectorXd dz = dec.reduce(c) - dec.reduce(refs.col(i));
      reduced += w[i] * dz.dot(dec.lambda.cwiseInverse().cwiseProduct(dz));
      const Eigen::VectorXd dc = c - refs.col(i);
      full += w[i] * dc.dot(pinv * dc);
    }
    EXPECT_NEAR(reduced, full, 1e-8 * (1.0 + std::abs(full)));
  }
}

TEST(Decompose, MiddleCoordinatesConstantForGeneratedReferences) {
  // Anisotropic generation noise leaves part of ker A untouched, so V₂ is
  // non-empty and every reference shares the same V₂ coordinates.
  const auto b = build_basis(BasisKind::legendre, {5, 6}, 2.0);
  const auto sys = endpoint_system(b, EndpointConditions::exact(Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 0)));
  const Eigen::VectorXd base = sys.A.completeOrthogonalDecomposition().solve(sys.gamma);
  Eigen::VectorXd scale = Eigen::VectorXd::Zero(b.total_size());
  scale.segment(0, 3).setConstant(0.2);
  scale.segment(5, 2).setConstant(0.1);
  const auto gen = generate_references(CoefficientVector{b, base}, sys, scale, 30, CandidateFilter{}, 5);
  const auto cov = estimate_covariance(gen.references.coefficients);
  const auto dec = decompose(project_to_kernel(cov.matrix, sys.A), sys, gen.references.coefficients);
  EXPECT_GT(dec.middle_size(), 0);
  EXPECT_LE(dec.pinned2_spread, 1e-6);
}

TEST(Decompose, NonCommutingCovarianceIsAModelMismatch) {
  const Eigen::RowVector2d A(0, 1);
  EXPECT_EQ(code_of([&] { decompose(Eigen::Matrix2d::Identity(), system_from(A, Eigen::VectorXd::Zero(1)), Eigen::MatrixXd(2, 0)); }),
            ErrorCode::model_mismatch);
}
