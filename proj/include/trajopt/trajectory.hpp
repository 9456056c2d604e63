#ifndef TRAJOPT_TRAJECTORY_HPP
#define TRAJOPT_TRAJECTORY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trajopt/basis.hpp"
#include "trajopt/error.hpp"

namespace trajopt {

/// Sampled multivariate trajectory: one row per time, one column per variable.
struct TrajectorySamples {
  std::vector<double> times;
  Eigen::MatrixXd values;
  std::vector<std::string> names;

  Eigen::Index size() const { return values.rows(); }
  Eigen::Index dimension_count() const { return values.cols(); }
};

inline void validate(const TrajectorySamples& s) {
  using detail::require;
  require(s.values.rows() == static_cast<Eigen::Index>(s.times.size()),
          ErrorCode::invalid_argument, "sample times and value rows differ in length");
  require(s.times.size() >= 2, ErrorCode::invalid_argument, "a trajectory needs at least two samples");
  require(s.names.empty() || static_cast<Eigen::Index>(s.names.size()) == s.values.cols(),
          ErrorCode::invalid_argument, "variable names do not match the column count");
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    require(std::isfinite(s.times[i]), ErrorCode::invalid_argument, "non-finite sample time");
    if (i > 0) {
      require(s.times[i] > s.times[i - 1], ErrorCode::invalid_argument,
              "sample times must be strictly increasing (index " + std::to_string(i) + ")");
    }
  }
  require(s.values.allFinite(), ErrorCode::invalid_argument, "non-finite sample value");
}

/// Stacked coefficients (c^(1); ...; c^(D)) of a projected trajectory.
struct CoefficientVector {
  BasisSpec basis;
  Eigen::VectorXd values;

  auto segment(int d) const { return values.segment(basis.offset(d), basis.dims[d]); }
  auto segment(int d) { return values.segment(basis.offset(d), basis.dims[d]); }
};

inline CoefficientVector make_coefficients(const BasisSpec& basis, Eigen::VectorXd values) {
  detail::require(values.size() == basis.total_size(), ErrorCode::invalid_argument,
                  "coefficient vector length " + std::to_string(values.size()) +
                      " does not match basis size " + std::to_string(basis.total_size()));
  detail::require(values.allFinite(), ErrorCode::invalid_argument, "non-finite coefficient");
  return CoefficientVector{basis, std::move(values)};
}

/// State y(t) of the trajectory represented by `c`.
inline Eigen::VectorXd evaluate(const BasisSpec& basis, const Eigen::VectorXd& c, double t) {
  const Eigen::VectorXd phi = eval_basis(basis, t);
  Eigen::VectorXd y(basis.dimension_count());
  for (int d = 0; d < basis.dimension_count(); ++d) {
    y[d] = phi.head(basis.dims[d]).dot(c.segment(basis.offset(d), basis.dims[d]));
  }
  return y;
}

inline Eigen::VectorXd evaluate_derivative(const BasisSpec& basis, const Eigen::VectorXd& c,
                                           double t) {
  const Eigen::VectorXd dphi = eval_basis_derivative(basis, t);
  Eigen::VectorXd y(basis.dimension_count());
  for (int d = 0; d < basis.dimension_count(); ++d) {
    y[d] = dphi.head(basis.dims[d]).dot(c.segment(basis.offset(d), basis.dims[d]));
  }
  return y;
}

/// Coefficients c_k^(d) = ∫_0^T y^(d) φ_k dt of the piecewise-linear
/// interpolant of the samples. Each sample interval is integrated with a
/// Gauss rule that is exact for (linear) x (basis polynomial).
inline CoefficientVector project(const TrajectorySamples& samples, const BasisSpec& basis) {
  validate(samples);
  const double T = basis.duration;
  detail::require(samples.values.cols() == basis.dimension_count(), ErrorCode::invalid_argument,
                  "samples have " + std::to_string(samples.values.cols()) +
                      " columns but the basis has " + std::to_string(basis.dimension_count()) +
                      " dimensions");
  const double eps = 1e-9 * std::max(1.0, T);
  detail::require(samples.times.front() <= eps && samples.times.back() >= T - eps,
                  ErrorCode::coverage,
                  "samples span [" + std::to_string(samples.times.front()) + ", " +
                      std::to_string(samples.times.back()) + "] but must cover [0, " +
                      std::to_string(T) + "]");

  const int kmax = basis.max_order();
  const auto unit = gauss_legendre_rule(kmax / 2 + 1, 1.0);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.total_size());
  const auto& t = samples.times;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double a = std::max(t[i], 0.0);
    const double b = std::min(t[i + 1], T);
    if (b <= a) continue;
    const double span = t[i + 1] - t[i];
    for (std::size_t q = 0; q < unit.nodes.size(); ++q) {
      const double tq = a + unit.nodes[q] * (b - a);
      const double w = unit.weights[q] * (b - a);
      const double s = (tq - t[i]) / span;
      const Eigen::VectorXd phi = eval_basis(basis, tq);
      for (int d = 0; d < basis.dimension_count(); ++d) {
        const double y = (1.0 - s) * samples.values(static_cast<Eigen::Index>(i), d) +
                         s * samples.values(static_cast<Eigen::Index>(i + 1), d);
        c.segment(basis.offset(d), basis.dims[d]) += (w * y) * phi.head(basis.dims[d]);
      }
    }
  }
  return CoefficientVector{basis, std::move(c)};
}

inline TrajectorySamples reconstruct(const CoefficientVector& c, std::span<const double> times,
                                     std::vector<std::string> names = {}) {
  const auto& basis = c.basis;
  TrajectorySamples out;
  out.times.assign(times.begin(), times.end());
  out.values.resize(static_cast<Eigen::Index>(times.size()), basis.dimension_count());
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = evaluate(basis, c.values, times[i]).transpose();
  }
  out.names = std::move(names);
  return out;
}

inline std::vector<double> uniform_grid(double duration, int points) {
  detail::require(points >= 2, ErrorCode::invalid_argument, "a grid needs at least two points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[i] = duration * i / (points - 1);
  grid.back() = duration;
  return grid;
}

/// Prescribed initial/final states. Dimensions with `constrained[d] == false`
/// contribute no rows to the endpoint system.
struct EndpointConditions {
  Eigen::VectorXd start;
  Eigen::VectorXd end;
  Eigen::VectorXd tolerance;
  std::vector<bool> constrained;

  static EndpointConditions exact(Eigen::VectorXd y0, Eigen::VectorXd yT) {
    const auto n = y0.size();
    return {std::move(y0), std::move(yT), Eigen::VectorXd::Zero(n),
            std::vector<bool>(static_cast<std::size_t>(n), true)};
  }

  bool is_constrained(int d) const {
    return constrained.empty() || constrained[static_cast<std::size_t>(d)];
  }
};

inline void validate(const EndpointConditions& e, int dims) {
  using detail::require;
  require(e.start.size() == dims && e.end.size() == dims && e.tolerance.size() == dims,
          ErrorCode::invalid_argument, "endpoint conditions must have one entry per dimension");
  require(e.constrained.empty() || static_cast<int>(e.constrained.size()) == dims,
          ErrorCode::invalid_argument, "endpoint mask must have one entry per dimension");
  require(e.start.allFinite() && e.end.allFinite() && e.tolerance.allFinite(),
          ErrorCode::invalid_argument, "endpoint conditions must be finite");
  require((e.tolerance.array() >= 0.0).all(), ErrorCode::invalid_argument,
          "endpoint tolerances must be non-negative");
}

/// A c = Γ with one row per constrained dimension at t = 0, then at t = T.
struct EndpointSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd gamma;
  Eigen::VectorXd tolerance;
  std::vector<std::string> row_labels;
};

inline EndpointSystem endpoint_system(const BasisSpec& basis, const EndpointConditions& cond) {
  const int D = basis.dimension_count();
  validate(cond, D);
  std::vector<int> active;
  for (int d = 0; d < D; ++d)
    if (cond.is_constrained(d)) active.push_back(d);
  const auto rows = static_cast<Eigen::Index>(2 * active.size());
  EndpointSystem sys{Eigen::MatrixXd::Zero(rows, basis.total_size()), Eigen::VectorXd(rows),
                     Eigen::VectorXd(rows), {}};
  const Eigen::VectorXd phi0 = eval_basis(basis, 0.0);
  const Eigen::VectorXd phiT = eval_basis(basis, basis.duration);
  const auto m = static_cast<Eigen::Index>(active.size());
  for (Eigen::Index r = 0; r < m; ++r) {
    const int d = active[static_cast<std::size_t>(r)];
    sys.A.block(r, basis.offset(d), 1, basis.dims[d]) = phi0.head(basis.dims[d]).transpose();
    sys.A.block(m + r, basis.offset(d), 1, basis.dims[d]) = phiT.head(basis.dims[d]).transpose();
    sys.gamma[r] = cond.start[d];
    sys.gamma[m + r] = cond.end[d];
    sys.tolerance[r] = cond.tolerance[d];
    sys.tolerance[m + r] = cond.tolerance[d];
  }
  for (Eigen::Index r = 0; r < m; ++r) sys.row_labels.push_back("y0[" + std::to_string(active[r]) + "]");
  for (Eigen::Index r = 0; r < m; ++r) sys.row_labels.push_back("yT[" + std::to_string(active[r]) + "]");
  return sys;
}

/// ‖A c − Γ‖_∞
inline double endpoint_residual(const EndpointSystem& sys, const Eigen::VectorXd& c) {
  if (sys.A.rows() == 0) return 0.0;
  return (sys.A * c - sys.gamma).lpNorm<Eigen::Infinity>();
}

/// True when every row satisfies |(A c − Γ)_r| ≤ tolerance_r + slack.
inline bool endpoints_satisfied(const EndpointSystem& sys, const Eigen::VectorXd& c,
                                double slack = 1e-10) {
  if (sys.A.rows() == 0) return true;
  const Eigen::VectorXd r = (sys.A * c - sys.gamma).cwiseAbs();
  return ((r - sys.tolerance).array() <= slack).all();
}

/// Forward differences Δy^(d)/Δt, one per sample interval.
inline std::vector<double> rate_of_climb(const TrajectorySamples& samples, int d) {
  detail::require(samples.times.size() >= 2, ErrorCode::invalid_argument,
                  "rate of change needs at least two samples");
  detail::require(d >= 0 && d < samples.values.cols(), ErrorCode::invalid_argument,
                  "rate dimension out of range");
  std::vector<double> out(samples.times.size() - 1);
  for (std::size_t i = 0; i + 1 < samples.times.size(); ++i) {
    const double dt = samples.times[i + 1] - samples.times[i];
    detail::require(dt != 0.0, ErrorCode::invalid_argument,
                    "duplicate sample time at index " + std::to_string(i + 1));
    out[i] = (samples.values(static_cast<Eigen::Index>(i + 1), d) -
              samples.values(static_cast<Eigen::Index>(i), d)) / dt;
  }
  return out;
}

/// One scalar inequality g(state) ≤ 0 over the (possibly augmented) state.
struct Constraint {
  std::string name;
  std::function<double(std::span<const double>)> g;
};

/// Inequalities checked on a uniform grid. The checked state is the sampled
/// state followed by one finite-difference rate column per entry of
/// `rate_dims` (in order), so derivative bounds are ordinary constraints.
struct ConstraintSet {
  std::vector<Constraint> constraints;
  std::vector<int> rate_dims;
  int grid_size = 200;
  double slack = 0.0;

  bool empty() const { return constraints.empty(); }

  void add(std::string name, std::function<double(std::span<const double>)> g) {
    constraints.push_back({std::move(name), std::move(g)});
  }

  void add_upper_bound(int column, double bound, std::string name = {}) {
    if (name.empty()) name = "x[" + std::to_string(column) + "] <= " + std::to_string(bound);
    add(std::move(name), [column, bound](std::span<const double> x) { return x[column] - bound; });
  }

  void add_lower_bound(int column, double bound, std::string name = {}) {
    if (name.empty()) name = "x[" + std::to_string(column) + "] >= " + std::to_string(bound);
    add(std::move(name), [column, bound](std::span<const double> x) { return bound - x[column]; });
  }

  /// Bound on dy^(d)/dt. `state_dims` is the number of sampled columns.
  void add_rate_upper_bound(int d, int state_dims, double bound, std::string name = {}) {
    auto it = std::find(rate_dims.begin(), rate_dims.end(), d);
    int slot = static_cast<int>(it - rate_dims.begin());
    if (it == rate_dims.end()) rate_dims.push_back(d);
    const int column = state_dims + slot;
    if (name.empty()) name = "d/dt x[" + std::to_string(d) + "] <= " + std::to_string(bound);
    add(std::move(name), [column, bound](std::span<const double> x) { return x[column] - bound; });
  }
};

struct ConstraintReport {
  bool admissible = true;
  std::vector<std::string> names;
  std::vector<double> worst;       // max_t g_ℓ(y(t))
  std::vector<double> worst_time;  // argmax
};

/// Samples with one finite-difference rate column appended per `rate_dims`
/// entry. The last sample reuses the final interval's slope.
inline Eigen::MatrixXd augmented_state(const TrajectorySamples& samples,
                                       std::span<const int> rate_dims) {
  const auto n = samples.values.rows();
  const auto D = samples.values.cols();
  Eigen::MatrixXd out(n, D + static_cast<Eigen::Index>(rate_dims.size()));
  out.leftCols(D) = samples.values;
  for (std::size_t j = 0; j < rate_dims.size(); ++j) {
    const auto rates = rate_of_climb(samples, rate_dims[j]);
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, D + static_cast<Eigen::Index>(j)) = rates[static_cast<std::size_t>(std::min<Eigen::Index>(i, n - 2))];
    }
  }
  return out;
}

inline ConstraintReport check_constraints(const TrajectorySamples& samples,
                                          const ConstraintSet& set) {
  detail::require(samples.values.rows() > 0, ErrorCode::invalid_argument,
                  "cannot check constraints on an empty trajectory");
  ConstraintReport report;
  if (set.constraints.empty()) return report;
  const Eigen::MatrixXd state = augmented_state(samples, set.rate_dims);
  std::vector<double> row(static_cast<std::size_t>(state.cols()));
  for (const auto& c : set.constraints) {
    report.names.push_back(c.name);
    report.worst.push_back(-std::numeric_limits<double>::infinity());
    report.worst_time.push_back(samples.times.front());
  }
  for (Eigen::Index i = 0; i < state.rows(); ++i) {
    for (Eigen::Index j = 0; j < state.cols(); ++j) row[static_cast<std::size_t>(j)] = state(i, j);
    for (std::size_t l = 0; l < set.constraints.size(); ++l) {
      const double v = set.constraints[l].g(row);
      if (!std::isfinite(v)) {
        detail::fail(ErrorCode::constraint_evaluation,
                     "constraint " + std::to_string(l) + " ('" + set.constraints[l].name +
                         "') is not finite at t = " + std::to_string(samples.times[static_cast<std::size_t>(i)]));
      }
      if (v > report.worst[l]) {
        report.worst[l] = v;
        report.worst_time[l] = samples.times[static_cast<std::size_t>(i)];
      }
    }
  }
  for (double w : report.worst) report.admissible = report.admissible && w <= set.slack;
  return report;
}

}  // namespace trajopt

#endif  // TRAJOPT_TRAJECTORY_HPP
