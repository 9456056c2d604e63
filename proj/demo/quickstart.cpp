// Minimal library walk-through on the two-dimensional force-field problem:
// generate references, build the MAP problem and solve it for a few ν.

#include <iostream>
#include <memory>

#include "trajopt/datagen.hpp"
#include "trajopt/optimizer.hpp"

int main() {
  using namespace trajopt;

  const Scenario s = forcefield_scenario(/*alpha=*/1.0, /*seed=*/11);
  const ReferenceSet& all = s.generated.references;
  std::cout << "generated " << all.size() << " references (acceptance " << s.generated.acceptance_rate() << ")\n";

  const auto cov = estimate_covariance(all.coefficients);
  const Eigen::MatrixXd sigma = project_to_kernel(cov.matrix, s.endpoints.A);
  auto dec = std::make_shared<const SubspaceDecomposition>(decompose(sigma, s.endpoints, all.coefficients));

  const auto cost = assemble_forcefield(s.config.cost.field, s.basis);
  const auto reduced = reduce_cost(cost, *dec);
  const auto weyl = weyl_certificate(reduced.Q, dec->lambda[0], 1.0);
  std::cout << "free coordinates: " << dec->sigma << ", kappa_min = " << weyl.kappa_min << '\n';

  for (double nu : {0.0, 1.0, 10.0, 100.0}) {
    const Solution sol = solve_reduced(build_map_problem(reduced, dec, all, nu));
    const CoefficientVector c{s.basis, sol.c};
    std::cout << "nu = " << nu << ": cost " << sol.cost << ", penalty " << sol.penalty << ", path length integral "
              << kinetic_integral(c) << '\n';
  }
}
