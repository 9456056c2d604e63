#ifndef TRAJOPT_DATAGEN_HPP
#define TRAJOPT_DATAGEN_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trajopt/basis.hpp"
#include "trajopt/config.hpp"
#include "trajopt/cost.hpp"
#include "trajopt/csv.hpp"
#include "trajopt/error.hpp"
#include "trajopt/refstats.hpp"
#include "trajopt/trajectory.hpp"

namespace trajopt {

/// Axis-aligned bounds checked on a uniform grid.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  int grid_points = 200;
};

inline bool inside(const Box& box, const CoefficientVector& c) {
  const auto grid = uniform_grid(c.basis.duration, box.grid_points);
  for (double t : grid) {
    const Eigen::VectorXd y = evaluate(c.basis, c.values, t);
    if ((y.array() < box.lower.array()).any() || (y.array() > box.upper.array()).any()) return false;
  }
  return true;
}

struct GenerationResult {
  ReferenceSet references;
  int attempts = 0;
  double acceptance_rate() const {
    return attempts ? static_cast<double>(references.size()) / attempts : 0.0;
  }
};

using CandidateFilter = std::function<bool(const CoefficientVector&)>;

/// Perturbs `base` by centered Gaussian noise projected onto ker A and keeps
/// candidates accepted by `accept`. `noise_scale` is either one isotropic
/// standard deviation or one per coefficient.
inline GenerationResult generate_references(const CoefficientVector& base, const EndpointSystem& sys,
                                            const Eigen::VectorXd& noise_scale, int count,
                                            const CandidateFilter& accept, std::uint64_t seed,
                                            int attempt_factor = 100) {
  using detail::require;
  const auto K = base.values.size();
  require(count >= 1, ErrorCode::invalid_argument, "count must be positive");
  require(attempt_factor >= 1, ErrorCode::invalid_argument, "attempt factor must be positive");
  require(noise_scale.size() == 1 || noise_scale.size() == K, ErrorCode::invalid_argument,
          "noise scale must be a scalar or one entry per coefficient");
  require((noise_scale.array() >= 0.0).all(), ErrorCode::invalid_argument, "noise scale must be non-negative");
  require(sys.A.cols() == K, ErrorCode::invalid_argument, "endpoint system does not match the basis");
  const double gscale = std::max(1.0, sys.gamma.size() ? sys.gamma.cwiseAbs().maxCoeff() : 0.0);
  require(endpoint_residual(sys, base.values) <= 1e-10 * gscale, ErrorCode::invalid_argument,
          "base trajectory does not satisfy the endpoint system");

  const Eigen::MatrixXd P = kernel_projector(sys.A, sys.row_labels);
  const Eigen::VectorXd scale =
      noise_scale.size() == 1 ? Eigen::VectorXd::Constant(K, noise_scale[0]) : noise_scale;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  GenerationResult out;
  out.references.basis = base.basis;
  std::vector<Eigen::VectorXd> kept;
  const long cap = static_cast<long>(attempt_factor) * count;
  while (static_cast<int>(kept.size()) < count) {
    require(out.attempts < cap, ErrorCode::generation_starved,
            "accepted " + std::to_string(kept.size()) + " of " + std::to_string(count) + " after " +
                std::to_string(out.attempts) + " attempts (acceptance rate " +
                std::to_string(static_cast<double>(kept.size()) / std::max(1, out.attempts)) + ")");
    ++out.attempts;
    Eigen::VectorXd eps(K);
    for (Eigen::Index k = 0; k < K; ++k) eps[k] = scale[k] * normal(rng);
    CoefficientVector cand{base.basis, base.values + P * eps};
    if (!accept || accept(cand)) kept.push_back(std::move(cand.values));
  }
  out.references.coefficients.resize(K, count);
  for (int i = 0; i < count; ++i) {
    out.references.coefficients.col(i) = kept[static_cast<std::size_t>(i)];
    std::ostringstream name;
    name << "ref_" << std::setw(3) << std::setfill('0') << i;
    out.references.names.push_back(name.str());
  }
  out.references.weights = Eigen::VectorXd::Constant(count, 1.0 / count);
  return out;
}

inline GenerationResult generate_references(const CoefficientVector& base, const EndpointSystem& sys,
                                            const Eigen::VectorXd& noise_scale, int count, const Box& box,
                                            std::uint64_t seed, int attempt_factor = 100) {
  return generate_references(
      base, sys, noise_scale, count, [&box](const CoefficientVector& c) { return inside(box, c); }, seed,
      attempt_factor);
}

/// Coefficients of a trajectory given as a function of time, by Gauss
/// quadrature with `nodes` points (exact for polynomials of degree
/// 2 nodes − 1 − K_max).
inline CoefficientVector project_function(const BasisSpec& basis,
                                          const std::function<Eigen::VectorXd(double)>& y, int nodes = 0) {
  if (nodes <= 0) nodes = 2 * basis.max_order() + 2;
  const auto rule = gauss_legendre_rule(nodes, basis.duration);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.total_size());
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const Eigen::VectorXd phi = eval_basis(basis, rule.nodes[q]);
    const Eigen::VectorXd v = y(rule.nodes[q]);
    for (int d = 0; d < basis.dimension_count(); ++d)
      c.segment(basis.offset(d), basis.dims[d]) += rule.weights[q] * v[d] * phi.head(basis.dims[d]);
  }
  return make_coefficients(basis, std::move(c));
}

/// Integral ∫ V(y)ᵀ ẏ dt of an affine field along the trajectory.
inline double work_integral(const ForceFieldSpec& field, const CoefficientVector& c, int nodes = 0) {
  ForceFieldSpec pure = field;
  pure.alpha = 0.0;
  return -eval_cost_quadrature(pure, c.values, c.basis, nodes);
}

/// Integral ∫ ‖ẏ‖² dt.
inline double kinetic_integral(const CoefficientVector& c, int nodes = 0) {
  if (nodes <= 0) nodes = c.basis.max_order() + 2;
  const auto rule = gauss_legendre_rule(nodes, c.basis.duration);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    acc += rule.weights[q] * evaluate_derivative(c.basis, c.values, rule.nodes[q]).squaredNorm();
  return acc;
}

/// A synthetic reference set together with the run configuration that
/// optimises against it.
struct Scenario {
  std::string name;
  RunConfig config;  // data_dir and output_dir relative to the scenario directory
  BasisSpec basis;
  EndpointSystem endpoints;
  CoefficientVector base;
  GenerationResult generated;
  double sample_step = 1.0;
  std::optional<QuadraticInstantaneousCost> cost;  // written as a noisy fuel_flow column when set
  double cost_noise = 0.0;
};

/// Synthetic fuel flow (kg/s) over (altitude ft, Mach, N1 %):
/// 0.25 + 0.2 M + 0.3 M² + 1e-10 h² − 1e-7 h N1 + 1.2e-4 N1².
/// The (h, N1) block is positive definite, so the flow stays above 0.25.
inline QuadraticInstantaneousCost climb_fuel_flow() {
  QuadraticInstantaneousCost f;
  f.Q = Eigen::MatrixXd::Zero(3, 3);
  f.Q(0, 0) = 1e-10;
  f.Q(0, 2) = f.Q(2, 0) = -5e-8;
  f.Q(1, 1) = 0.3;
  f.Q(2, 2) = 1.2e-4;
  f.w = Eigen::Vector3d(0.0, 0.2, 0.0);
  f.r = 0.25;
  return f;
}

/// Climb from 3000 ft / Mach 0.30 to 38000 ft / Mach 0.78 with free N1,
/// 48 references sampled every 5 s over 1100 s.
inline Scenario climb_scenario(std::uint64_t seed = 7) {
  constexpr double T = 1100.0;
  Scenario s;
  s.name = "climb";
  s.sample_step = 5.0;
  s.basis = build_basis(BasisKind::legendre, {4, 10, 6}, T);
  s.base = project_function(s.basis, [](double t) {
    const double u = t / T;
    Eigen::VectorXd y(3);
    y << 3000.0 + 35000.0 * (1.4 * u - 0.4 * u * u),
        0.30 + 0.48 * (0.5 * u + 0.5 * u * u * u),
        93.0 - 5.0 * u + 2.0 * u * u;
    return y;
  });

  RunConfig& c = s.config;
  c.data_dir = "references";
  c.output_dir = "out";
  c.variables = {"altitude", "mach", "n1"};
  c.dims = {4, 10, 6};
  c.endpoints["altitude"] = {3000.0, 38000.0, 100.0, std::nullopt};
  c.endpoints["mach"] = {0.30, 0.78, 0.01, std::nullopt};
  c.constraints.push_back({ConstraintKind::upper_bound, "mach", 0.82, 1.0, "MMO"});
  c.constraints.push_back({ConstraintKind::derivative_upper_bound, "altitude", 3600.0, 60.0, "gamma_max"});
  c.constraints.push_back({ConstraintKind::lower_bound, "mach", 0.28, 1.0, "min_mach"});
  c.constraints.push_back({ConstraintKind::lower_bound, "n1", 85.0, 1.0, "climb_thrust"});
  c.cost.source = CostSource::explicit_quadratic;
  c.cost.quadratic = climb_fuel_flow();
  c.optimizer.nu_max = 10.0;
  c.references.best_count = 5;
  c.covariance.rank_rtol = 1e-13;
  c.grid_size = 221;
  c.seed = seed;
  c.confidence.sigma = 0.02;
  s.cost = climb_fuel_flow();
  s.cost_noise = 0.02;
  s.endpoints = endpoint_system(s.basis, endpoint_conditions(c));

  // Per-coefficient noise decaying with order: about 600 ft, 0.02 Mach and 2 % N1.
  const double root = std::sqrt(T);
  Eigen::VectorXd scale(s.basis.total_size());
  const double amp[] = {600.0 * root, 0.02 * root, 2.0 * root};
  for (int d = 0; d < 3; ++d)
    for (int k = 0; k < s.basis.dims[d]; ++k) scale[s.basis.offset(d) + k] = amp[d] / (k + 1);

  const ConstraintSet limits = build_constraint_set(c);
  const Box box{Eigen::Vector3d(0.0, 0.2, 50.0), Eigen::Vector3d(45000.0, 0.82, 100.0), 221};
  auto accept = [&](const CoefficientVector& cand) {
    if (!inside(box, cand)) return false;
    const auto grid = uniform_grid(T, c.grid_size);
    return check_constraints(reconstruct(cand, grid), limits).admissible;
  };
  s.generated = generate_references(s.base, s.endpoints, scale, 48, accept, seed);
  return s;
}

/// Two-dimensional field V(x) = (0, x₁) on [0, 1]² with 122 references from
/// (0.111, 0.926) to (0.912, 0.211).
inline Scenario forcefield_scenario(double alpha = 0.0, std::uint64_t seed = 11) {
  constexpr double T = 1.0;
  Scenario s;
  s.name = "forcefield";
  s.sample_step = 0.005;
  s.basis = build_basis(BasisKind::legendre, {4, 6}, T);
  s.base = project_function(s.basis, [](double t) {
    Eigen::VectorXd y(2);
    y << 0.111 + 0.801 * t * t, 0.926 - 0.715 * t;
    return y;
  });

  RunConfig& c = s.config;
  c.data_dir = "references";
  c.output_dir = "out";
  c.variables = {"x1", "x2"};
  c.dims = {4, 6};
  c.endpoints["x1"] = {0.111, 0.912, 1e-4, std::nullopt};
  c.endpoints["x2"] = {0.926, 0.211, 1e-4, std::nullopt};
  for (const char* v : {"x1", "x2"}) {
    c.constraints.push_back({ConstraintKind::lower_bound, v, 0.0, 1.0, std::string(v) + " >= 0"});
    c.constraints.push_back({ConstraintKind::upper_bound, v, 1.0, 1.0, std::string(v) + " <= 1"});
  }
  c.cost.source = CostSource::force_field;
  c.cost.field.M = Eigen::MatrixXd::Zero(2, 2);
  c.cost.field.M(1, 0) = 1.0;
  c.cost.field.b = Eigen::VectorXd::Zero(2);
  c.cost.field.alpha = alpha;
  c.optimizer.nu_max = 1000.0;
  c.references.best_count = 10;
  c.grid_size = 201;
  c.seed = seed;
  s.endpoints = endpoint_system(s.basis, endpoint_conditions(c));

  const Box box{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0), 201};
  s.generated = generate_references(s.base, s.endpoints, Eigen::VectorXd::Constant(1, 0.08), 122, box, seed);
  return s;
}

inline Scenario make_scenario(const std::string& name, std::uint64_t seed) {
  if (name == "climb") return climb_scenario(seed);
  if (name == "forcefield") return forcefield_scenario(0.0, seed);
  detail::fail(ErrorCode::invalid_argument, "unknown scenario '" + name + "' (expected climb or forcefield)");
}

/// Writes one CSV per reference under `dir`/`config.data_dir` and the run
/// configuration as `dir`/config.json. Returns the configuration path.
inline std::filesystem::path write_scenario(const Scenario& s, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path data = dir / s.config.data_dir;
  std::error_code ec;
  fs::create_directories(data, ec);
  detail::require(!ec, ErrorCode::io, data.string() + ": " + ec.message());

  const double T = s.basis.duration;
  const int steps = static_cast<int>(std::lround(T / s.sample_step));
  std::vector<double> times(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) times[static_cast<std::size_t>(i)] = i == steps ? T : i * s.sample_step;

  std::mt19937_64 rng(s.config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto& refs = s.generated.references;
  for (Eigen::Index i = 0; i < refs.size(); ++i) {
    csv::Table table;
    table.header.push_back("time");
    for (const auto& v : s.config.variables) table.header.push_back(v);
    if (s.cost) table.header.push_back("fuel_flow");
    const auto samples = reconstruct(CoefficientVector{s.basis, refs.coefficients.col(i)}, times);
    for (std::size_t r = 0; r < times.size(); ++r) {
      std::vector<double> row{times[r]};
      const Eigen::VectorXd y = samples.values.row(static_cast<Eigen::Index>(r)).transpose();
      for (Eigen::Index d = 0; d < y.size(); ++d) row.push_back(y[d]);
      if (s.cost) row.push_back((*s.cost)(y) + s.cost_noise * noise(rng));
      table.rows.push_back(std::move(row));
    }
    csv::write(data / (refs.names[static_cast<std::size_t>(i)] + ".csv"), table);
  }

  const fs::path config_path = dir / "config.json";
  std::ofstream out(config_path, std::ios::binary);
  detail::require(static_cast<bool>(out), ErrorCode::io, config_path.string() + ": cannot open for writing");
  out << config_to_json(s.config).dump(2) << '\n';
  detail::require(static_cast<bool>(out), ErrorCode::io, config_path.string() + ": write failed");
  return config_path;
}

}  // namespace trajopt

#endif  // TRAJOPT_DATAGEN_HPP
