#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "trajopt/optimizer.hpp"
#include "test_helpers.hpp"

using namespace trajopt;
using testing_helpers::code_of;
using testing_helpers::expect_matrix_near;
using testing_helpers::random_matrix;
using testing_helpers::random_vector;

namespace {

struct Instance {
  BasisSpec basis;
  EndpointSystem sys;
  ReferenceSet refs;
  Eigen::MatrixXd sigma;
  std::shared_ptr<const SubspaceDecomposition> dec;
  AssembledQuadraticCost cost;
  ReducedQuadraticCost reduced;
};

// References spread over a random subspace of ker A; cost Q̌ = GGᵀ + shift·I.
Instance make_instance(std::mt19937_64& rng, int count, double shift, int spread_rank = 5) {
  Instance in;
  in.basis = build_basis(BasisKind::legendre, {4, 5}, 2.0);
  const int K = in.basis.total_size();
  in.sys = endpoint_system(in.basis, EndpointConditions::exact(random_vector(rng, 2), random_vector(rng, 2)));
  const Eigen::VectorXd base = in.sys.A.completeOrthogonalDecomposition().solve(in.sys.gamma);
  const Eigen::MatrixXd P = kernel_projector(in.sys.A);
  const Eigen::MatrixXd dirs = P * random_matrix(rng, K, spread_rank);
  in.refs.basis = in.basis;
  in.refs.coefficients.resize(K, count);
  for (int i = 0; i < count; ++i) in.refs.coefficients.col(i) = base + dirs * random_vector(rng, spread_rank);
  in.refs.weights = compute_weights(static_cast<std::size_t>(count), WeightScheme::uniform);
  in.sigma = project_to_kernel(estimate_covariance(in.refs.coefficients).matrix, in.sys.A);
  in.dec = std::make_shared<const SubspaceDecomposition>(decompose(in.sigma, in.sys, in.refs.coefficients));
  const Eigen::MatrixXd G = random_matrix(rng, K, K);
  in.cost = {G * G.transpose() / K + shift * Eigen::MatrixXd::Identity(K, K), random_vector(rng, K), 1.0};
  in.reduced = reduce_cost(in.cost, *in.dec);
  return in;
}

// Problem whose objective is exactly zᵀHz − 2bᵀz, with the identity as decomposition.
MapProblem explicit_problem(const Eigen::MatrixXd& H, const Eigen::VectorXd& b) {
  const auto n = H.rows();
  auto dec = std::make_shared<SubspaceDecomposition>();
  dec->V = Eigen::MatrixXd::Identity(n, n);
  dec->sigma = static_cast<int>(n);
  dec->lambda = Eigen::VectorXd::Ones(n);
  MapProblem p;
  p.cost = {H - Eigen::MatrixXd::Identity(n, n), -2.0 * b, 0.0};
  p.references = Eigen::MatrixXd::Zero(n, 1);
  p.weights = Eigen::VectorXd::Ones(1);
  p.lambda = dec->lambda;
  p.decomposition = dec;
  p.nu = 1.0;
  p.inequalities.L.resize(0, n);
  return p;
}

}  // namespace

TEST(Weyl, HandExample) {
  const Eigen::Matrix2d Q = Eigen::Vector2d(-2, 1).asDiagonal();
  const auto rep = weyl_certificate(Q, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(rep.rho, -2.0);
  EXPECT_DOUBLE_EQ(rep.kappa_min, 1.0);
  EXPECT_TRUE(rep.certified);
  EXPECT_DOUBLE_EQ(rep.nu_max(), 1.0);
  const Eigen::Vector2d lambda(0.5, 0.25);
  const Eigen::Matrix2d M = Q + rep.kappa_min * lambda.cwiseInverse().asDiagonal().toDenseMatrix();
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(M).eigenvalues().minCoeff(), -1e-12);
  EXPECT_FALSE(weyl_certificate(Q, 0.5, 0.5).certified);
}

TEST(Weyl, PositiveSemidefiniteCostIsAlwaysCertified) {
  const auto rep = weyl_certificate(Eigen::Matrix2d::Identity(), 3.0, 1e-9);
  EXPECT_EQ(rep.kappa_min, 0.0);
  EXPECT_TRUE(rep.certified);
  EXPECT_TRUE(std::isinf(rep.nu_max()));
  const Eigen::Matrix2d sigma = Eigen::Vector2d(0.5, 0.2).asDiagonal();
  EXPECT_DOUBLE_EQ(weyl_certificate(Eigen::Vector2d(-2, 1).asDiagonal(), sigma, 1.0).kappa_min, 1.0);
}

TEST(Solve, NuZeroIsTheWeightedMean) {
  std::mt19937_64 rng(31);
  auto in = make_instance(rng, 6, 0.0);
  const std::vector<double> user{1, 2, 3, 4, 5, 6};
  in.refs.weights = compute_weights(6, WeightScheme::user, {}, user);
  const auto sol = solve_reduced(build_map_problem(in.reduced, in.dec, in.refs, 0.0));
  EXPECT_EQ(sol.diagnostics.method, "weighted-mean");
  EXPECT_LE((sol.reduced - in.dec->V1().transpose() * in.refs.weighted_mean()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((sol.c - in.refs.weighted_mean()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE(endpoint_residual(in.sys, sol.c), 1e-8);
}

TEST(Solve, SingleReferenceAtNuZero) {
  std::mt19937_64 rng(32);
  auto in = make_instance(rng, 4, 0.0);
  const std::size_t first = 0;
  ReferenceSet one = in.refs.subset(std::span<const std::size_t>(&first, 1));
  const auto sol = solve_reduced(build_map_problem(in.reduced, in.dec, one, 0.0));
  EXPECT_LE((sol.c - one.coefficients.col(0)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(sol.penalty, 0.0, 1e-20);
}

TEST(Solve, ConvexInstanceSatisfiesKkt) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const auto in = make_instance(rng, 8, 0.1);
    const auto p = build_map_problem(in.reduced, in.dec, in.refs, 5.0);
    const auto sol = solve_reduced(p);
    EXPECT_EQ(sol.diagnostics.method, "closed-form");
    EXPECT_LE(p.gradient(sol.reduced).lpNorm<Eigen::Infinity>(), 1e-9 * (1 + p.half_rhs().norm()));
    EXPECT_LE(sol.objective, p.objective(p.weighted_mean()) + 1e-12);
    EXPECT_LE(endpoint_residual(in.sys, sol.c), 1e-8);
    EXPECT_NEAR(sol.cost, in.cost(sol.c), 1e-8 * (1 + std::abs(sol.cost)));
  }
}

TEST(Solve, RegularisationPathIsMonotone) {
  std::mt19937_64 rng(34);
  const auto in = make_instance(rng, 8, 0.0);
  double prev_cost = std::numeric_limits<double>::infinity(), prev_pen = -1.0;
  for (int i = 0; i < 10; ++i) {
    const double nu = 1e-3 * std::pow(10.0, 0.5 * i);
    const auto sol = solve_reduced(build_map_problem(in.reduced, in.dec, in.refs, nu));
    EXPECT_LE(sol.cost, prev_cost + 1e-9);
    EXPECT_GE(sol.penalty, prev_pen - 1e-9);
    prev_cost = sol.cost;
    prev_pen = sol.penalty;
  }
}

TEST(Solve, ReducedAndUnreducedObjectivesDifferByAConstant) {
  std::mt19937_64 rng(35);
  const auto in = make_instance(rng, 7, 0.0);
  const auto p = build_map_problem(in.reduced, in.dec, in.refs, 2.5);
  const Eigen::MatrixXd pinv = pseudoinverse(in.sigma);
  double offset = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd z = random_vector(rng, p.size());
    const double diff = unreduced_objective(in.cost, pinv, in.refs, 2.5, in.dec->lift(z)) - p.objective(z);
    if (i == 0) offset = diff;
    EXPECT_NEAR(diff, offset, 1e-8 * (1 + std::abs(p.objective(z))));
  }
}

TEST(Solve, NoCheaperPointWithSmallerPenalty) {
  std::mt19937_64 rng(36);
  const auto in = make_instance(rng, 8, 0.05);
  const auto p = build_map_problem(in.reduced, in.dec, in.refs, 3.0);
  const auto sol = solve_reduced(p);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd z = sol.reduced + (0.01 + 0.1 * (i % 10)) * random_vector(rng, p.size());
    const bool cheaper = p.cost(z) < sol.cost - 1e-12;
    const bool closer = p.penalty(z) < sol.penalty - 1e-12;
    EXPECT_FALSE(cheaper && closer) << "sample " << i;
  }
}

TEST(Solve, ActiveSetMatchesQpOracle) {
  Eigen::Matrix3d H;
  H << 2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 3.0;
  auto p = explicit_problem(H, Eigen::Vector3d(3.0, 2.0, -1.0));
  LinearInequalities in;
  in.L = (Eigen::MatrixXd(4, 3) << 1, 0, 0, 0, 1, 1, -1, 0, 0, 0, 0, -1).finished();
  in.u = Eigen::Vector4d(0.5, 1.0, 2.0, 0.1);
  add_inequalities(p, in);
  const auto sol = solve_reduced(p);
  EXPECT_EQ(sol.diagnostics.method, "active-set");
  EXPECT_LE((sol.reduced - Eigen::Vector3d(0.5, 1.1, -0.1)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(sol.objective, -5.354, 1e-10);
  EXPECT_EQ(sol.diagnostics.active_set, (std::vector<int>{0, 1, 3}));
}

TEST(Solve, SingularConvexObjectiveUsesMinimumNorm) {
  // H = diag(1, 0) with b in its range.
  auto p = explicit_problem(Eigen::Vector2d(1, 0).asDiagonal(), Eigen::Vector2d(2, 0));
  const auto sol = solve_reduced(p);
  EXPECT_EQ(sol.diagnostics.method, "minimum-norm");
  EXPECT_LE((sol.reduced - Eigen::Vector2d(2, 0)).norm(), 1e-12);
  auto flat = explicit_problem(Eigen::Vector2d(1, 0).asDiagonal(), Eigen::Vector2d(2, 1));
  EXPECT_EQ(code_of([&] { solve_reduced(flat); }), ErrorCode::unbounded);
}

TEST(Solve, IndefiniteObjective) {
  const Eigen::Matrix2d H = Eigen::Vector2d(1, -1).asDiagonal();
  auto p = explicit_problem(H, Eigen::Vector2d(1, 0.5));
  EXPECT_EQ(code_of([&] { solve_reduced(p); }), ErrorCode::unbounded);
  LinearInequalities box;
  box.L = (Eigen::MatrixXd(4, 2) << 1, 0, -1, 0, 0, 1, 0, -1).finished();
  box.u = Eigen::Vector4d(2, 2, 2, 2);
  add_inequalities(p, box);
  const auto sol = solve_reduced(p);
  EXPECT_EQ(sol.diagnostics.method, "barrier-trust-region");
  EXPECT_TRUE(sol.diagnostics.local);
  // Global minimiser of z₁² − z₂² − 2z₁ − z₂ on the box is (1, 2).
  EXPECT_LE((sol.reduced - Eigen::Vector2d(1, 2)).norm(), 1e-6);
}

TEST(Solve, EndpointBandsAreVacuousOnTheFreeSubspace) {
  std::mt19937_64 rng(37);
  auto in = make_instance(rng, 6, 0.1);
  in.sys.tolerance.setConstant(0.1);
  const auto p = build_map_problem(in.reduced, in.dec, in.refs, 1.0, in.sys);
  EXPECT_EQ(p.inequalities.size(), 0);
  EXPECT_EQ(p.dropped_inequalities, 2 * in.sys.A.rows());
  const auto sol = solve_reduced(p);
  EXPECT_TRUE(endpoints_satisfied(in.sys, sol.c));
}

TEST(Lift, PinsTheConstrainedCoordinate) {
  const Eigen::RowVector2d A(0, 1);
  const EndpointSystem sys{A, Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Zero(1), {}};
  const auto dec = decompose(Eigen::Vector2d(1, 0).asDiagonal(), sys, Eigen::MatrixXd(2, 0));
  const Eigen::VectorXd c = lift_solution(Eigen::VectorXd::Constant(1, 0.7), dec);
  EXPECT_DOUBLE_EQ(c[1], 3.0);
  EXPECT_NEAR(dec.reduce(c)[0], 0.7, 1e-12);
}

TEST(TuneNu, VacuousConstraintsReturnNuMax) {
  std::mt19937_64 rng(38);
  const auto in = make_instance(rng, 6, 0.1);
  const auto res = tune_nu([&](double nu) { return build_map_problem(in.reduced, in.dec, in.refs, nu); },
                           [](const Solution&) { return ConstraintReport{}; }, 10.0);
  EXPECT_EQ(res.nu, 10.0);
  EXPECT_EQ(res.history.size(), 1u);
}

TEST(TuneNu, BracketsTheThreshold) {
  // One free coordinate: z*(ν) = (m − ν w/2)/(1 + ν) with Λ = 1 and Q = 0.
  auto p = explicit_problem(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1));
  p.cost = {Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Constant(1, -2.0), 0.0};
  // z*(ν) = ν, so the bound z ≤ 0.3 fails exactly above ν̄ = 0.3.
  const double nu_bar = 0.3, nu_max = 1.0;
  const auto res = tune_nu(
      [&](double nu) {
        auto q = p;
        q.nu = nu;
        return q;
      },
      [&](const Solution& s) {
        ConstraintReport r;
        r.admissible = s.reduced[0] <= nu_bar;
        return r;
      },
      nu_max);
  EXPECT_LE(res.nu, nu_bar);
  EXPECT_GE(res.nu, nu_bar * (1.0 - std::pow(2.0, -20) * nu_max / nu_bar));
  EXPECT_EQ(res.history.size(), 22u);
}

TEST(TuneNu, AlwaysInadmissibleFails) {
  std::mt19937_64 rng(39);
  const auto in = make_instance(rng, 6, 0.1);
  auto never = [](const Solution&) {
    ConstraintReport r;
    r.admissible = false;
    return r;
  };
  EXPECT_EQ(code_of([&] {
              tune_nu([&](double nu) { return build_map_problem(in.reduced, in.dec, in.refs, nu); }, never, 1.0);
            }),
            ErrorCode::no_admissible_solution);
}

TEST(TuneNu, UnboundedSolvesCountAsInadmissible) {
  // Concave cost: ν > 1 makes H = 1 − ν indefinite and the solve unbounded.
  auto p = explicit_problem(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1));
  p.cost = {Eigen::MatrixXd::Constant(1, 1, -1.0), Eigen::VectorXd::Constant(1, 0.1), 0.0};
  const auto res = tune_nu(
      [&](double nu) {
        auto q = p;
        q.nu = nu;
        return q;
      },
      [](const Solution&) { return ConstraintReport{}; }, 4.0);
  EXPECT_LT(res.nu, 1.0);
  EXPECT_GT(res.nu, 0.99);
  EXPECT_NE(res.history.front().note.find("unbounded"), std::string::npos);
}
