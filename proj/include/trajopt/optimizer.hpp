#ifndef TRAJOPT_OPTIMIZER_HPP
#define TRAJOPT_OPTIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trajopt/cost.hpp"
#include "trajopt/error.hpp"
#include "trajopt/refstats.hpp"
#include "trajopt/trajectory.hpp"

namespace trajopt {

/// L z ≤ u on reduced coordinates.
struct LinearInequalities {
  Eigen::MatrixXd L;
  Eigen::VectorXd u;
  std::vector<std::string> labels;

  Eigen::Index size() const { return L.rows(); }
  bool empty() const { return L.rows() == 0; }
};

/// ν·F̃(z) + Σᵢ ωᵢ (z − rᵢ)ᵀ Λ⁻¹ (z − rᵢ) over the free coordinates z = c̃₁.
struct MapProblem {
  ReducedQuadraticCost cost;
  Eigen::MatrixXd references;  // σ x I, reduced reference coordinates
  Eigen::VectorXd weights;
  Eigen::VectorXd lambda;      // Λ_{Σ,1}
  std::shared_ptr<const SubspaceDecomposition> decomposition;
  double nu = 0.0;
  LinearInequalities inequalities;
  int dropped_inequalities = 0;  // band rows that are vacuous on the free coordinates

  Eigen::Index size() const { return lambda.size(); }
  double kappa() const { return nu > 0.0 ? 1.0 / nu : std::numeric_limits<double>::infinity(); }

  Eigen::VectorXd weighted_mean() const { return references * weights; }

  double penalty(const Eigen::VectorXd& z) const {
    const Eigen::VectorXd inv = lambda.cwiseInverse();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < references.cols(); ++i) {
      const Eigen::VectorXd d = z - references.col(i);
      acc += weights[i] * d.dot(inv.cwiseProduct(d));
    }
    return acc;
  }

  double objective(const Eigen::VectorXd& z) const {
    return (nu > 0.0 ? nu * cost(z) : 0.0) + penalty(z);
  }

  /// H with objective(z) = zᵀ H z − 2 bᵀ z + const.
  Eigen::MatrixXd half_hessian() const {
    Eigen::MatrixXd H = nu * cost.Q;
    H.diagonal() += lambda.cwiseInverse();
    return 0.5 * (H + H.transpose());
  }

  Eigen::VectorXd half_rhs() const {
    return lambda.cwiseInverse().cwiseProduct(weighted_mean()) - 0.5 * nu * cost.w;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const {
    return 2.0 * (half_hessian() * z - half_rhs());
  }
};

inline void validate(const MapProblem& p) {
  using detail::require;
  const auto s = p.size();
  require(s > 0, ErrorCode::degenerate_problem, "no free coordinates to optimise");
  require(std::isfinite(p.nu) && p.nu >= 0.0, ErrorCode::invalid_argument, "nu must be non-negative");
  require((p.lambda.array() > 0.0).all(), ErrorCode::invalid_argument,
          "covariance eigenvalues on the free subspace must be positive");
  require(p.cost.Q.rows() == s && p.cost.Q.cols() == s && p.cost.w.size() == s,
          ErrorCode::invalid_argument, "reduced cost does not match the free dimension");
  require(p.references.rows() == s && p.references.cols() == p.weights.size() && p.weights.size() > 0,
          ErrorCode::invalid_argument, "reduced references and weights are inconsistent");
  require(p.inequalities.L.cols() == s || p.inequalities.empty(), ErrorCode::invalid_argument,
          "inequality matrix has the wrong width");
  require(p.inequalities.u.size() == p.inequalities.L.rows(), ErrorCode::invalid_argument,
          "inequality bounds have the wrong length");
}

/// Appends the rows of `extra` to the problem's inequalities.
inline void add_inequalities(MapProblem& p, const LinearInequalities& extra) {
  auto& in = p.inequalities;
  const auto m0 = in.L.rows(), m1 = extra.L.rows();
  Eigen::MatrixXd L(m0 + m1, p.size());
  Eigen::VectorXd u(m0 + m1);
  if (m0) {
    L.topRows(m0) = in.L;
    u.head(m0) = in.u;
  }
  if (m1) {
    L.bottomRows(m1) = extra.L;
    u.tail(m1) = extra.u;
  }
  in.L = std::move(L);
  in.u = std::move(u);
  for (Eigen::Index r = 0; r < m1; ++r) {
    in.labels.push_back(static_cast<std::size_t>(r) < extra.labels.size()
                            ? extra.labels[static_cast<std::size_t>(r)]
                            : "row " + std::to_string(m0 + r));
  }
}

inline MapProblem build_map_problem(const ReducedQuadraticCost& cost,
                                    std::shared_ptr<const SubspaceDecomposition> dec,
                                    const ReferenceSet& refs, double nu) {
  using detail::require;
  require(dec != nullptr, ErrorCode::invalid_argument, "missing decomposition");
  require(dec->sigma > 0, ErrorCode::degenerate_problem,
          "covariance has rank zero: no free coordinates to optimise");
  require(std::isfinite(nu) && nu >= 0.0, ErrorCode::invalid_argument, "nu must be non-negative");
  require(refs.coefficients.rows() == dec->size(), ErrorCode::invalid_argument,
          "references and decomposition sizes differ");
  validate(refs);
  MapProblem p;
  p.cost = cost;
  p.references = dec->V1().transpose() * refs.coefficients;
  p.weights = refs.weights;
  p.lambda = dec->lambda;
  p.decomposition = std::move(dec);
  p.nu = nu;
  p.inequalities.L.resize(0, p.size());
  validate(p);
  return p;
}

/// Same as above, adding the tolerance bands |A c − Γ| ≤ δ as inequalities on
/// the free coordinates. Rows whose coefficients vanish on the free subspace
/// are checked once and then dropped.
inline MapProblem build_map_problem(const ReducedQuadraticCost& cost,
                                    std::shared_ptr<const SubspaceDecomposition> dec,
                                    const ReferenceSet& refs, double nu, const EndpointSystem& sys) {
  MapProblem p = build_map_problem(cost, dec, refs, nu);
  const auto& d = *p.decomposition;
  if (sys.A.rows() == 0) return p;
  detail::require(sys.A.cols() == d.size(), ErrorCode::invalid_argument,
                  "endpoint system does not match the decomposition");
  const Eigen::MatrixXd AV1 = sys.A * d.V1();
  const auto rest = d.size() - d.sigma;
  const Eigen::VectorXd offset = sys.A * (d.V.rightCols(rest) * d.pinned()) - sys.gamma;
  const double scale = std::max(1.0, sys.A.cwiseAbs().maxCoeff());
  LinearInequalities bands;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> bounds;
  for (Eigen::Index r = 0; r < sys.A.rows(); ++r) {
    const double tol = sys.tolerance[r];
    if (tol <= 0.0) continue;
    const std::string label = r < static_cast<Eigen::Index>(sys.row_labels.size())
                                  ? sys.row_labels[static_cast<std::size_t>(r)]
                                  : std::to_string(r);
    if (AV1.row(r).norm() <= 1e-12 * scale) {
      detail::require(std::abs(offset[r]) <= tol + 1e-10 * scale, ErrorCode::no_admissible_solution,
                      "endpoint row " + label + " is pinned outside its tolerance band");
      p.dropped_inequalities += 2;
      continue;
    }
    rows.push_back(AV1.row(r).transpose());
    bounds.push_back(tol - offset[r]);
    bands.labels.push_back(label + " upper");
    rows.push_back(-AV1.row(r).transpose());
    bounds.push_back(tol + offset[r]);
    bands.labels.push_back(label + " lower");
  }
  bands.L.resize(static_cast<Eigen::Index>(rows.size()), p.size());
  bands.u.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bands.L.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    bands.u[static_cast<Eigen::Index>(i)] = bounds[i];
  }
  add_inequalities(p, bands);
  return p;
}

struct WeylReport {
  double rho = 0.0;        // smallest eigenvalue of Q̃
  double lambda1 = 0.0;    // largest eigenvalue of Σ
  double kappa_min = 0.0;  // max(0, −ρ λ₁)
  double kappa = 0.0;
  bool certified = false;  // sufficient condition only

  /// Largest ν = 1/κ covered by the certificate.
  double nu_max() const {
    return kappa_min > 0.0 ? 1.0 / kappa_min : std::numeric_limits<double>::infinity();
  }
};

inline WeylReport weyl_certificate(const Eigen::MatrixXd& Q, double lambda1, double kappa) {
  using detail::require;
  require(Q.rows() == Q.cols() && Q.rows() > 0, ErrorCode::invalid_argument, "Q must be square");
  require(lambda1 >= 0.0, ErrorCode::invalid_argument, "covariance must be positive semi-definite");
  WeylReport r;
  r.rho = detail::sorted_eigen(0.5 * (Q + Q.transpose())).values.minCoeff();
  r.lambda1 = lambda1;
  r.kappa_min = std::max(0.0, -r.rho * lambda1);
  r.kappa = kappa;
  r.certified = kappa >= r.kappa_min;
  return r;
}

inline WeylReport weyl_certificate(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& sigma, double kappa) {
  const auto eig = detail::sorted_eigen(0.5 * (sigma + sigma.transpose()));
  return weyl_certificate(Q, eig.values.size() ? std::max(0.0, eig.values[0]) : 0.0, kappa);
}

struct SolverDiagnostics {
  std::string method;
  bool local = false;
  bool positive_definite = false;
  int iterations = 0;
  std::vector<int> active_set;
  double kkt_residual = 0.0;
};

struct Solution {
  Eigen::VectorXd c;        // c*
  Eigen::VectorXd reduced;  // c̃₁*
  double nu = 0.0;
  double objective = 0.0;
  double cost = 0.0;     // F̌(c*) = F̃(c̃₁*)
  double penalty = 0.0;
  ConstraintReport admissibility;
  SolverDiagnostics diagnostics;
};

inline Eigen::VectorXd lift_solution(const Eigen::VectorXd& reduced, const SubspaceDecomposition& dec) {
  return dec.lift(reduced);
}

namespace detail {

// min ½λᵀMλ + qᵀλ over λ ≥ 0 (M symmetric PSD), Lawson-Hanson style.
inline Eigen::VectorXd nonnegative_qp(const Eigen::MatrixXd& M, const Eigen::VectorXd& q, double tol,
                                      int& iterations) {
  const auto m = q.size();
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(static_cast<std::size_t>(m), false);
  const int cap = 50 * static_cast<int>(m) + 100;
  iterations = 0;
  auto solve_passive = [&](Eigen::VectorXd& zeta) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < m; ++i)
      if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd Mp(n, n);
    Eigen::VectorXd qp(n);
    for (Eigen::Index a = 0; a < n; ++a) {
      qp[a] = q[idx[a]];
      for (Eigen::Index b = 0; b < n; ++b) Mp(a, b) = M(idx[a], idx[b]);
    }
    const Eigen::VectorXd sol = Mp.completeOrthogonalDecomposition().solve(-qp);
    zeta.setZero(m);
    for (Eigen::Index a = 0; a < n; ++a) zeta[idx[a]] = sol[a];
  };
  while (true) {
    const Eigen::VectorXd grad = M * lam + q;
    Eigen::Index j = -1;
    double most = -tol;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!passive[static_cast<std::size_t>(i)] && grad[i] < most) {
        most = grad[i];
        j = i;
      }
    }
    if (j < 0) return lam;
    passive[static_cast<std::size_t>(j)] = true;
    while (true) {
      require(++iterations <= cap, ErrorCode::numerical, "active-set iteration limit reached");
      Eigen::VectorXd zeta;
      solve_passive(zeta);
      bool positive = true;
      for (Eigen::Index i = 0; i < m; ++i)
        if (passive[static_cast<std::size_t>(i)] && zeta[i] <= 0.0) positive = false;
      if (positive) {
        lam = zeta;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (passive[static_cast<std::size_t>(i)] && zeta[i] <= 0.0) {
          alpha = std::min(alpha, lam[i] / (lam[i] - zeta[i]));
        }
      }
      lam += alpha * (zeta - lam);
      for (Eigen::Index i = 0; i < m; ++i) {
        if (passive[static_cast<std::size_t>(i)] && lam[i] <= 1e-15 * (1.0 + lam.cwiseAbs().maxCoeff())) {
          passive[static_cast<std::size_t>(i)] = false;
          lam[i] = 0.0;
        }
      }
      if (std::none_of(passive.begin(), passive.end(), [](bool b) { return b; })) break;
    }
  }
}

// Exact solution of min gᵀp + ½ pᵀ B p subject to ‖p‖ ≤ radius.
inline Eigen::VectorXd trust_region_step(const Eigen::MatrixXd& B, const Eigen::VectorXd& g, double radius) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (B + B.transpose()));
  require(es.info() == Eigen::Success, ErrorCode::numerical, "trust-region eigensolve failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  const Eigen::MatrixXd& Qm = es.eigenvectors();
  const Eigen::VectorXd gq = Qm.transpose() * g;
  auto step_norm = [&](double shift) {
    return (gq.array() / (ev.array() + shift)).matrix().norm();
  };
  const double lmin = ev.minCoeff();
  if (lmin > 0.0 && step_norm(0.0) <= radius) {
    return -Qm * (gq.array() / ev.array()).matrix();
  }
  double lo = std::max(0.0, -lmin);
  double hi = lo + g.norm() / radius + ev.cwiseAbs().maxCoeff() + 1.0;
  const double gmin = std::abs(gq[0]);
  if (gmin <= 1e-14 * (1.0 + g.norm()) && (lmin <= 0.0) ) {
    // Hard case: fill to the boundary along the lowest eigenvector.
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      const double den = ev[i] - lmin;
      if (den > 1e-14 * (1.0 + std::abs(lmin))) coef[i] = -gq[i] / den;
    }
    if (coef.norm() <= radius) {
      coef[0] = std::sqrt(std::max(0.0, radius * radius - coef.squaredNorm()));
      return Qm * coef;
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (step_norm(mid) > radius) lo = mid; else hi = mid;
  }
  return -Qm * (gq.array() / (ev.array() + hi)).matrix();
}

}  // namespace detail

/// Minimiser of the MAP objective on the free coordinates, lifted to c*.
inline Solution solve_reduced(const MapProblem& problem) {
  using detail::require;
  validate(problem);
  const auto s = problem.size();
  const auto& ineq = problem.inequalities;
  const Eigen::VectorXd mean = problem.weighted_mean();
  Solution sol;
  sol.nu = problem.nu;
  auto finish = [&](Eigen::VectorXd z) {
    require(z.allFinite(), ErrorCode::numerical, "solver produced non-finite coordinates");
    sol.reduced = std::move(z);
    sol.objective = problem.objective(sol.reduced);
    sol.cost = problem.cost(sol.reduced);
    sol.penalty = problem.penalty(sol.reduced);
    if (problem.decomposition) sol.c = lift_solution(sol.reduced, *problem.decomposition);
    return sol;
  };

  if (problem.nu == 0.0 && ineq.empty()) {
    sol.diagnostics.method = "weighted-mean";
    sol.diagnostics.positive_definite = true;
    return finish(mean);
  }

  const Eigen::MatrixXd H = problem.half_hessian();
  const Eigen::VectorXd b = problem.half_rhs();
  const double scale = std::max(std::abs(H.trace()) / static_cast<double>(s), std::numeric_limits<double>::min());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
  const bool pd = ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 1e-12 * scale &&
                  ldlt.isPositive();
  sol.diagnostics.positive_definite = pd;

  if (pd) {
    const Eigen::VectorXd z0 = ldlt.solve(b);
    if (ineq.empty()) {
      sol.diagnostics.method = "closed-form";
      sol.diagnostics.kkt_residual = (H * z0 - b).lpNorm<Eigen::Infinity>();
      return finish(z0);
    }
    // z = z0 − H⁻¹Lᵀλ with λ ≥ 0 solving the dual of the inequality QP.
    const Eigen::MatrixXd HinvLt = ldlt.solve(ineq.L.transpose());
    Eigen::MatrixXd M = ineq.L * HinvLt;
    M = 0.5 * (M + M.transpose()).eval();
    const Eigen::VectorXd q = ineq.u - ineq.L * z0;
    const double qscale = std::max(1.0, q.cwiseAbs().maxCoeff());
    int iterations = 0;
    const Eigen::VectorXd lam = detail::nonnegative_qp(M, q, 1e-12 * qscale, iterations);
    const Eigen::VectorXd z = z0 - HinvLt * lam;
    const Eigen::VectorXd slack = ineq.u - ineq.L * z;
    double kkt = (H * z - b + ineq.L.transpose() * lam).lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
      kkt = std::max({kkt, -slack[i], std::abs(lam[i] * slack[i])});
      if (lam[i] > 0.0) sol.diagnostics.active_set.push_back(static_cast<int>(i));
    }
    sol.diagnostics.method = "active-set";
    sol.diagnostics.iterations = iterations;
    sol.diagnostics.kkt_residual = kkt;
    require(kkt <= 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff() + qscale), ErrorCode::numerical,
            "active-set solve did not reach the KKT tolerance (residual " + std::to_string(kkt) + ")");
    return finish(z);
  }

  const auto eig = detail::sorted_eigen(H);
  const double lmin = eig.values[s - 1];
  const double tol = 1e-12 * std::max(scale, std::abs(eig.values[0]));
  if (ineq.empty()) {
    require(lmin >= -tol, ErrorCode::unbounded,
            "objective is not convex (min curvature " + std::to_string(lmin) +
                ") and no inequality bounds the descent direction");
    // Positive semi-definite: consistent systems get the minimum-norm minimiser.
    const int r = detail::count_above(eig.values, 1e-12);
    const Eigen::MatrixXd Vr = eig.vectors.leftCols(r);
    const Eigen::VectorXd z = Vr * (Vr.transpose() * b).cwiseQuotient(eig.values.head(r));
    require((H * z - b).norm() <= 1e-9 * std::max(1.0, b.norm()), ErrorCode::unbounded,
            "objective is flat along a direction with non-zero slope");
    sol.diagnostics.method = "minimum-norm";
    sol.diagnostics.kkt_residual = (H * z - b).lpNorm<Eigen::Infinity>();
    return finish(z);
  }

  // Non-convex with bounds: log-barrier path, each stage minimised by an
  // exact trust-region Newton method from the weighted reference mean.
  Eigen::VectorXd z = mean;
  Eigen::VectorXd slack = ineq.u - ineq.L * z;
  require((slack.array() > 0.0).all(), ErrorCode::numerical,
          "weighted reference mean is not strictly inside the inequality bounds");
  const double obj_scale = std::max(1.0, std::abs(problem.objective(z)));
  const double blowup = 1e10 * (1.0 + mean.norm());
  double mu = obj_scale / static_cast<double>(ineq.size());
  double radius = 1.0 + mean.norm();
  int iterations = 0;
  double grad_norm = 0.0;
  auto barrier = [&](const Eigen::VectorXd& x, double m) {
    const Eigen::VectorXd sl = ineq.u - ineq.L * x;
    if ((sl.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
    return problem.objective(x) - m * sl.array().log().sum();
  };
  while (true) {
    for (int inner = 0; inner < 500; ++inner) {
      ++iterations;
      slack = ineq.u - ineq.L * z;
      const Eigen::VectorXd inv = slack.cwiseInverse();
      const Eigen::VectorXd g = 2.0 * (H * z - b) + mu * ineq.L.transpose() * inv;
      const Eigen::MatrixXd B =
          2.0 * H + mu * ineq.L.transpose() * inv.cwiseAbs2().asDiagonal() * ineq.L;
      grad_norm = g.norm();
      if (grad_norm <= 1e-8 * obj_scale) break;
      const Eigen::VectorXd p = detail::trust_region_step(B, g, radius);
      const double predicted = -(g.dot(p) + 0.5 * p.dot(B * p));
      const double actual = barrier(z, mu) - barrier(z + p, mu);
      const double ratio = predicted > 0.0 ? actual / predicted : -1.0;
      if (ratio < 0.25) {
        radius = 0.25 * p.norm();
      } else if (ratio > 0.75 && std::abs(p.norm() - radius) <= 1e-8 * radius) {
        radius *= 2.0;
      }
      if (ratio > 1e-4 && std::isfinite(actual)) z += p;
      require(z.norm() <= blowup, ErrorCode::unbounded, "objective decreases without bound inside the bounds");
      if (radius <= 1e-15 * (1.0 + z.norm())) break;
    }
    if (mu <= 1e-12 * obj_scale) break;
    mu *= 0.1;
  }
  sol.diagnostics.method = "barrier-trust-region";
  sol.diagnostics.local = true;
  sol.diagnostics.iterations = iterations;
  sol.diagnostics.kkt_residual = grad_norm;
  slack = ineq.u - ineq.L * z;
  for (Eigen::Index i = 0; i < slack.size(); ++i)
    if (slack[i] <= 1e-6 * (1.0 + std::abs(ineq.u[i]))) sol.diagnostics.active_set.push_back(static_cast<int>(i));
  return finish(z);
}

/// ν F̌(c) + Σᵢ ωᵢ (c − c_Rᵢ)ᵀ Σ† (c − c_Rᵢ) on full coefficient vectors.
inline double unreduced_objective(const AssembledQuadraticCost& cost, const Eigen::MatrixXd& sigma_pinv,
                                  const ReferenceSet& refs, double nu, const Eigen::VectorXd& c) {
  double acc = nu > 0.0 ? nu * cost(c) : 0.0;
  for (Eigen::Index i = 0; i < refs.size(); ++i) {
    const Eigen::VectorXd d = c - refs.coefficients.col(i);
    acc += refs.weights[i] * d.dot(sigma_pinv * d);
  }
  return acc;
}

struct NuSearchStep {
  double nu = 0.0;
  bool admissible = false;
  std::string note;
};

struct NuSearchResult {
  double nu = 0.0;
  Solution solution;
  std::vector<NuSearchStep> history;
};

using ProblemBuilder = std::function<MapProblem(double nu)>;
using AdmissibilityChecker = std::function<ConstraintReport(const Solution&)>;

/// Largest ν in [0, ν_max] (to bisection resolution) whose solution passes the checker.
inline NuSearchResult tune_nu(const ProblemBuilder& build, const AdmissibilityChecker& check, double nu_max,
                              int max_iters = 20) {
  using detail::require;
  require(std::isfinite(nu_max) && nu_max > 0.0, ErrorCode::invalid_argument, "nu_max must be positive");
  require(max_iters >= 0, ErrorCode::invalid_argument, "bisection iterations must be non-negative");
  NuSearchResult result;
  auto attempt = [&](double nu, Solution& out) {
    NuSearchStep step{nu, false, {}};
    try {
      out = solve_reduced(build(nu));
      out.admissibility = check(out);
      step.admissible = out.admissibility.admissible;
      if (!step.admissible) step.note = "constraints violated";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::unbounded && e.code() != ErrorCode::numerical) throw;
      step.note = std::string(to_string(e.code())) + ": " + e.what();
    }
    result.history.push_back(step);
    return step.admissible;
  };

  Solution candidate;
  if (attempt(nu_max, candidate)) {
    result.nu = nu_max;
    result.solution = std::move(candidate);
    return result;
  }
  Solution best;
  if (!attempt(0.0, best)) {
    detail::fail(ErrorCode::no_admissible_solution,
                 "the weighted reference mean (nu = 0) violates the constraints");
  }
  double lo = 0.0, hi = nu_max;
  for (int i = 0; i < max_iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (attempt(mid, candidate)) {
      lo = mid;
      best = std::move(candidate);
    } else {
      hi = mid;
    }
  }
  result.nu = lo;
  result.solution = std::move(best);
  return result;
}

}  // namespace trajopt

#endif  // TRAJOPT_OPTIMIZER_HPP
