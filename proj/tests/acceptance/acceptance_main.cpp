// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "trajopt/trajopt.hpp"

using namespace trajopt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds; 0 for none
  std::function<Outcome()> run;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

Eigen::VectorXd gaussian(std::mt19937_64& rng, Eigen::Index n) { return gaussian(rng, n, 1); }

BasisSpec random_basis(std::mt19937_64& rng, double T) {
  std::uniform_int_distribution<int> dim(1, 3), order(1, 8);
  std::vector<int> dims(static_cast<std::size_t>(dim(rng)));
  for (int& k : dims) k = order(rng);
  return build_basis(BasisKind::legendre, dims, T);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("trajopt_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome closed_form_costs() {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto b = random_basis(rng, i % 2 ? 50.0 : 1.0);
    const auto D = b.dimension_count();
    const Eigen::MatrixXd G = gaussian(rng, D, D);
    const QuadraticInstantaneousCost f{0.5 * (G + G.transpose()), gaussian(rng, D), gaussian(rng, 1)[0]};
    const Eigen::VectorXd c = gaussian(rng, b.total_size());
    const double closed = assemble_quadratic(f, b)(c);
    worst = std::max(worst, std::abs(closed - eval_cost_quadrature(f, c, b)) / (1.0 + std::abs(closed)));
  }
  double worst_field = 0.0;
  for (double alpha : {0.0, 0.35, 1.0, 10.0}) {
    for (int i = 0; i < 100; ++i) {
      const auto b = random_basis(rng, i % 2 ? 50.0 : 1.0);
      const auto D = b.dimension_count();
      const ForceFieldSpec spec{gaussian(rng, D, D), gaussian(rng, D), alpha};
      const Eigen::VectorXd c = gaussian(rng, b.total_size());
      const double closed = assemble_forcefield(spec, b)(c);
      worst_field = std::max(worst_field,
                             std::abs(closed - eval_cost_quadrature(spec, c, b)) / (1.0 + std::abs(closed)));
    }
  }
  return {worst <= 1e-9 && worst_field <= 1e-9,
          format("max relative error quadratic %.2e, force field %.2e", worst, worst_field)};
}

Outcome decomposition_fidelity() {
  std::mt19937_64 rng(2);
  double recon = 0.0, ortho = 0.0, penalty = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 6 + trial % 15;
    const int rows = 1 + trial % 4;
    const int rank = 1 + trial % (K - rows);
    const Eigen::MatrixXd A = gaussian(rng, rows, K);
    const Eigen::VectorXd gamma = gaussian(rng, rows);
    const Eigen::MatrixXd G = gaussian(rng, K, rank);
    const Eigen::MatrixXd sigma = project_to_kernel(G * G.transpose(), A);

    // References in 𝒱₁: a particular solution plus directions in range Σ.
    const Eigen::VectorXd base = A.completeOrthogonalDecomposition().solve(gamma);
    const Eigen::MatrixXd spread = sigma * gaussian(rng, K, rank);
    Eigen::MatrixXd refs(K, 5);
    for (int i = 0; i < 5; ++i) refs.col(i) = base + spread * gaussian(rng, rank);
    const auto dec = decompose(sigma, EndpointSystem{A, gamma, Eigen::VectorXd::Zero(rows), {}}, refs);

    Eigen::VectorXd ls = Eigen::VectorXd::Zero(K), la = Eigen::VectorXd::Zero(K);
    ls.head(dec.sigma) = dec.lambda;
    la.tail(dec.a) = dec.singular.cwiseAbs2();
    recon = std::max({recon, (dec.V * ls.asDiagonal() * dec.V.transpose() - sigma).norm(),
                      (dec.V * la.asDiagonal() * dec.V.transpose() - A.transpose() * A).norm()});
    ortho = std::max(ortho, (dec.V.transpose() * dec.V - Eigen::MatrixXd::Identity(K, K)).norm());

    const Eigen::MatrixXd pinv = pseudoinverse(sigma);
    const Eigen::VectorXd c = dec.lift(gaussian(rng, dec.sigma));
    double reduced = 0.0, full = 0.0;
    for (int i = 0; i < 5; ++i) {
      const Eigen::VectorXd dz = dec.reduce(c) - dec.reduce(refs.col(i));
      reduced += 0.2 * dz.dot(dec.lambda.cwiseInverse().cwiseProduct(dz));
      const Eigen::VectorXd dc = c - refs.col(i);
      full += 0.2 * dc.dot(pinv * dc);
    }
    penalty = std::max(penalty, std::abs(reduced - full) / (1.0 + std::abs(full)));
  }
  return {recon <= 1e-8 && ortho <= 1e-10 && penalty <= 1e-8,
          format("reconstruction %.2e, orthogonality %.2e, penalty %.2e", recon, ortho, penalty)};
}

struct Instance {
  EndpointSystem sys;
  ReferenceSet refs;
  Eigen::MatrixXd sigma;
  std::shared_ptr<const SubspaceDecomposition> dec;
  AssembledQuadraticCost cost;
  ReducedQuadraticCost reduced;
};

Instance random_instance(std::mt19937_64& rng, int count, double shift) {
  Instance in;
  const auto basis = build_basis(BasisKind::legendre, {5, 6}, 3.0);
  const int K = basis.total_size();
  in.sys = endpoint_system(basis, EndpointConditions::exact(gaussian(rng, 2), gaussian(rng, 2)));
  const Eigen::VectorXd base = in.sys.A.completeOrthogonalDecomposition().solve(in.sys.gamma);
  const Eigen::MatrixXd dirs = kernel_projector(in.sys.A) * gaussian(rng, K, 5);
  in.refs.basis = basis;
  in.refs.coefficients.resize(K, count);
  for (int i = 0; i < count; ++i) in.refs.coefficients.col(i) = base + dirs * gaussian(rng, 5);
  std::vector<double> costs(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) costs[static_cast<std::size_t>(i)] = 1.0 + i;
  in.refs.weights = compute_weights(static_cast<std::size_t>(count), WeightScheme::inverse_cost_rank, costs);
  in.sigma = project_to_kernel(estimate_covariance(in.refs.coefficients).matrix, in.sys.A);
  in.dec = std::make_shared<const SubspaceDecomposition>(decompose(in.sigma, in.sys, in.refs.coefficients));
  const Eigen::MatrixXd G = gaussian(rng, K, K);
  in.cost = {G * G.transpose() / K + shift * Eigen::MatrixXd::Identity(K, K), gaussian(rng, K), 0.0};
  in.reduced = reduce_cost(in.cost, *in.dec);
  return in;
}

Outcome nu_zero_limit() {
  std::mt19937_64 rng(3);
  double mean_err = 0.0, ends = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = random_instance(rng, 4 + trial % 5, -0.5);
    const auto sol = solve_reduced(build_map_problem(in.reduced, in.dec, in.refs, 0.0));
    Eigen::VectorXd want = Eigen::VectorXd::Zero(in.dec->sigma);
    for (Eigen::Index i = 0; i < in.refs.size(); ++i)
      want += in.refs.weights[i] * in.dec->reduce(in.refs.coefficients.col(i));
    mean_err = std::max(mean_err, (sol.reduced - want).cwiseAbs().maxCoeff());
    ends = std::max(ends, endpoint_residual(in.sys, sol.c));
  }
  return {mean_err <= 1e-10 && ends <= 1e-8,
          format("max |c1 - weighted mean| %.2e, max |Ac - Gamma| %.2e", mean_err, ends)};
}

Outcome regularisation_path() {
  std::mt19937_64 rng(4);
  const auto in = random_instance(rng, 8, -0.3);
  const auto weyl = weyl_certificate(in.reduced.Q, in.dec->lambda[0], 1.0);
  const double top = std::isfinite(weyl.nu_max()) ? 0.9 * weyl.nu_max() : 100.0;
  double prev_cost = std::numeric_limits<double>::infinity(), prev_pen = -1.0;
  bool monotone = true, certified = true;
  for (int i = 0; i < 10; ++i) {
    const double nu = top * std::pow(10.0, -3.0 + i / 3.0);
    certified = certified && weyl_certificate(in.reduced.Q, in.dec->lambda[0], 1.0 / nu).certified;
    const auto sol = solve_reduced(build_map_problem(in.reduced, in.dec, in.refs, nu));
    monotone = monotone && sol.cost <= prev_cost + 1e-9 && sol.penalty >= prev_pen - 1e-9;
    prev_cost = sol.cost;
    prev_pen = sol.penalty;
  }
  return {monotone && certified && weyl.kappa_min > 0.0,
          format("indefinite cost (rho %.3g), nu in [%.3g, %.3g], certified %s, monotone %s", weyl.rho, top * 1e-3,
                 top, certified ? "yes" : "no", monotone ? "yes" : "no")};
}

Outcome weyl_bound() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> size(2, 20);
  std::uniform_real_distribution<double> spread(0.05, 5.0);
  double worst = std::numeric_limits<double>::infinity();
  int indefinite = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int K = size(rng);
    const Eigen::MatrixXd G = gaussian(rng, K, K);
    Eigen::MatrixXd Q = 0.5 * (G + G.transpose());
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q).eigenvalues()[0];
    if (lo >= 0.0) Q -= (lo + 1.0) * Eigen::MatrixXd::Identity(K, K);
    Eigen::VectorXd lambda(K);
    for (int k = 0; k < K; ++k) lambda[k] = spread(rng);
    std::sort(lambda.data(), lambda.data() + K, std::greater<>());
    const auto rep = weyl_certificate(Q, lambda[0], 1.0);
    indefinite += rep.rho < 0.0;
    const Eigen::MatrixXd M = Q + rep.kappa_min * lambda.cwiseInverse().asDiagonal().toDenseMatrix();
    worst = std::min(worst, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues()[0]);
  }
  return {worst >= -1e-8 && indefinite == 50,
          format("%d indefinite instances, smallest eigenvalue %.3e", indefinite, worst)};
}

Outcome forcefield_reproduction() {
  const double straight = std::pow(0.912 - 0.111, 2) + std::pow(0.211 - 0.926, 2);
  std::vector<double> gains, J;
  for (double alpha : {0.0, 0.35, 1.0, 10.0}) {
    const Scenario s = forcefield_scenario(alpha, 11);
    const fs::path dir = scratch("forcefield");
    const RunResult r = run_optimization(load_config(write_scenario(s, dir)));
    const CoefficientVector opt{r.basis, r.search.solution.c};
    const double w_opt = work_integral(s.config.cost.field, opt);
    const auto& refs = s.generated.references;
    double gain = 0.0;
    for (Eigen::Index i = 0; i < refs.size(); ++i) {
      const double w = work_integral(s.config.cost.field, CoefficientVector{r.basis, refs.coefficients.col(i)});
      gain += 100.0 * (w_opt - w) / std::abs(w);
    }
    gains.push_back(gain / static_cast<double>(refs.size()));
    J.push_back(kinetic_integral(opt));
  }
  const bool ordered = gains[0] > gains[1] && gains[1] > gains[2] && gains[2] > gains[3];
  const bool positive = gains[0] > 0.0 && gains[1] > 0.0;
  const bool near = std::abs(J[3] - straight) <= 0.05 * straight;
  const bool far = J[0] >= 1.1 * straight;
  return {ordered && positive && near && far,
          format("gains %.2f > %.2f > %.2f > %.2f %%, J(10) = %.4f, J(0) = %.4f, straight line %.4f", gains[0],
                 gains[1], gains[2], gains[3], J[3], J[0], straight)};
}

Outcome climb_substitute() {
  const Scenario s = climb_scenario(7);
  const fs::path dir = scratch("climb");
  const RunConfig config = load_config(write_scenario(s, dir));
  const RunResult r = run_optimization(config);
  const auto& traj = r.trajectory;
  double max_mach = -1.0, max_roc = -1.0e9;
  for (Eigen::Index i = 0; i < traj.values.rows(); ++i) {
    max_mach = std::max(max_mach, traj.values(i, 1));
    if (i > 0) {
      const double dt = traj.times[static_cast<std::size_t>(i)] - traj.times[static_cast<std::size_t>(i - 1)];
      max_roc = std::max(max_roc, 60.0 * (traj.values(i, 0) - traj.values(i - 1, 0)) / dt);
    }
  }
  const double T = r.basis.duration;
  const Eigen::VectorXd y0 = evaluate(r.basis, r.search.solution.c, 0.0);
  const Eigen::VectorXd yT = evaluate(r.basis, r.search.solution.c, T);
  const bool ends = std::abs(y0[0] - 3000.0) <= 100.0 && std::abs(yT[0] - 38000.0) <= 100.0 &&
                    std::abs(y0[1] - 0.30) <= 0.01 && std::abs(yT[1] - 0.78) <= 0.01;
  const double best = *std::min_element(r.reference_costs.begin(), r.reference_costs.end());
  const double cost = r.search.solution.cost;
  const bool ok = r.search.solution.admissibility.admissible && max_mach <= 0.82 && max_roc <= 3600.0 && ends &&
                  cost < best;
  return {ok, format("cost %.3f < best reference %.3f (mean saving %.2f %%), max Mach %.4f, max climb %.0f ft/min, "
                     "endpoints %s",
                     cost, best, r.savings.percent_stats.mean, max_mach, max_roc, ends ? "met" : "missed")};
}

Outcome interval_coverage() {
  const CostNoiseModel model{0.3, 50.0};
  const auto cov = simulate_coverage(10.0, model, 0.95, 50000, 16, 2024);
  double ratio_err = 0.0;
  const auto width = [](double T) {
    const auto [lo, hi] = confidence_interval(0.0, CostNoiseModel{0.3, T}, 0.95);
    return hi - lo;
  };
  for (double T : {0.5, 4.0, 9.0, 1100.0})
    ratio_err = std::max(ratio_err, std::abs(width(T) / width(1.0) - std::sqrt(T)) / std::sqrt(T));
  return {cov.rate() >= 0.94 && cov.rate() <= 0.96 && ratio_err <= 1e-14,
          format("coverage %.4f over %d replications, width/sqrt(T) relative deviation %.1e", cov.rate(),
                 cov.replications, ratio_err)};
}

Outcome projection_round_trip() {
  std::mt19937_64 rng(9);
  double round = 0.0, forward = 0.0, backward = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double T = trial % 2 ? 50.0 : 1.0;
    const auto b = random_basis(rng, T);
    const auto D = b.dimension_count();
    const CoefficientVector c{b, gaussian(rng, b.total_size())};
    round = std::max(round, (project(reconstruct(c, uniform_grid(T, 20001)), b).values - c.values).cwiseAbs().maxCoeff());

    // Endpoints of the reconstruction ⇒ A c = Γ.
    const Eigen::VectorXd y0 = evaluate(b, c.values, 0.0), yT = evaluate(b, c.values, T);
    const auto own = endpoint_system(b, EndpointConditions::exact(y0, yT));
    forward = std::max(forward, endpoint_residual(own, c.values));

    // A c = Γ ⇒ reconstruction meets the endpoints. Needs two functions per dimension.
    if (*std::min_element(b.dims.begin(), b.dims.end()) < 2) continue;
    const Eigen::VectorXd s0 = gaussian(rng, D), sT = gaussian(rng, D);
    const auto sys = endpoint_system(b, EndpointConditions::exact(s0, sT));
    const Eigen::VectorXd x = c.values + sys.A.completeOrthogonalDecomposition().solve(sys.gamma - sys.A * c.values);
    backward = std::max({backward, (evaluate(b, x, 0.0) - s0).cwiseAbs().maxCoeff(),
                         (evaluate(b, x, T) - sT).cwiseAbs().maxCoeff()});
  }
  return {round <= 1e-6 && forward <= 1e-8 && backward <= 1e-8,
          format("round trip %.2e, endpoints to system %.2e, system to endpoints %.2e", round, forward, backward)};
}

Outcome determinism() {
  const fs::path dir = scratch("determinism");
  const RunConfig config = load_config(write_scenario(climb_scenario(7), dir));
  const auto a = emit_outputs(run_optimization(config), dir / "run_a");
  const auto b = emit_outputs(run_optimization(config), dir / "run_b");
  const std::string sa = slurp(a.summary), sb = slurp(b.summary);
  const bool same = !sa.empty() && sa == sb && slurp(a.trajectory) == slurp(b.trajectory);
  return {same, format("summary %zu bytes, %s", sa.size(), same ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "closed-form cost matches quadrature", 5.0, closed_form_costs},
      {2, "decomposition fidelity", 5.0, decomposition_fidelity},
      {3, "nu = 0 gives the weighted reference mean", 0.0, nu_zero_limit},
      {4, "monotone regularisation path", 0.0, regularisation_path},
      {5, "Weyl convexity certificate", 0.0, weyl_bound},
      {6, "force-field scenario pattern", 10.0, forcefield_reproduction},
      {7, "climb scenario improves on every reference", 10.0, climb_substitute},
      {8, "confidence interval coverage and scaling", 10.0, interval_coverage},
      {9, "projection round trip and endpoint equivalence", 0.0, projection_round_trip},
      {10, "deterministic summaries", 0.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      out = c.run();
    } catch (const Error& e) {
      out = {false, std::string("error ") + std::string(to_string(e.code())) +
                        (e.stage().empty() ? "" : " in " + e.stage()) + ": " + e.what()};
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit <= 0.0 || seconds < c.time_limit;
    const bool pass = out.pass && in_time;
    failed += !pass;
    std::printf("%s criterion %d: %s | %s | %.2f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                out.detail.c_str(), seconds,
                in_time ? "" : format(" (limit %.0f s)", c.time_limit).c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
