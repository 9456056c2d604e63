#ifndef TRAJOPT_CONFIG_HPP
#define TRAJOPT_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "trajopt/basis.hpp"
#include "trajopt/csv.hpp"
#include "trajopt/cost.hpp"
#include "trajopt/error.hpp"
#include "trajopt/refstats.hpp"
#include "trajopt/trajectory.hpp"

namespace trajopt {

struct EndpointSpec {
  double start = 0.0;
  double end = 0.0;
  double tolerance = 0.0;
  std::optional<double> selection_tolerance;  // ingestion filter; defaults to `tolerance`

  double filter_tolerance() const { return selection_tolerance.value_or(tolerance); }
};

enum class ConstraintKind { upper_bound, lower_bound, derivative_upper_bound };

struct ConstraintSpec {
  ConstraintKind kind = ConstraintKind::upper_bound;
  std::string variable;
  double bound = 0.0;
  double per_seconds = 1.0;  // derivative bounds are given per this many seconds
  std::string name;
};

enum class CostSource { explicit_quadratic, fitted, force_field };

struct CostConfig {
  CostSource source = CostSource::explicit_quadratic;
  QuadraticInstantaneousCost quadratic;
  std::string target_column;  // fitted
  ForceFieldSpec field;
};

struct OptimizerConfig {
  double nu_max = 1.0;
  int bisection_iterations = 20;
  double feasibility_slack = 0.0;
};

struct ReferenceConfig {
  int best_count = 5;
  WeightScheme weight_scheme = WeightScheme::uniform;
  std::vector<double> user_weights;
};

struct CovarianceConfig {
  double shrinkage = 0.0;
  double rank_rtol = 1e-10;
};

struct ConfidenceConfig {
  double level = 0.95;
  std::optional<double> sigma;  // falls back to the fitted residual std when the cost is fitted
};

struct RunConfig {
  std::filesystem::path data_dir;
  std::vector<std::string> variables;
  BasisKind basis_kind = BasisKind::legendre;
  std::vector<int> dims;
  std::optional<double> duration;
  std::map<std::string, EndpointSpec> endpoints;
  std::vector<ConstraintSpec> constraints;
  CostConfig cost;
  OptimizerConfig optimizer;
  ReferenceConfig references;
  CovarianceConfig covariance;
  int grid_size = 200;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  ConfidenceConfig confidence;

  int variable_index(const std::string& name) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
      if (variables[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline std::string to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::upper_bound: return "upper-bound";
    case ConstraintKind::lower_bound: return "lower-bound";
    case ConstraintKind::derivative_upper_bound: return "derivative-upper-bound";
  }
  return "unknown";
}

inline std::string to_string(CostSource s) {
  switch (s) {
    case CostSource::explicit_quadratic: return "explicit-quadratic";
    case CostSource::fitted: return "fitted";
    case CostSource::force_field: return "force-field";
  }
  return "unknown";
}

inline std::string to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::uniform: return "uniform";
    case WeightScheme::inverse_cost_rank: return "inverse-cost-rank";
    case WeightScheme::user: return "user";
  }
  return "unknown";
}

inline void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& msg) { detail::require(ok, ErrorCode::config, msg); };
  require(!c.variables.empty(), "at least one variable is required");
  require(c.dims.size() == c.variables.size(), "basis.dims needs one entry per variable");
  for (std::size_t i = 0; i < c.dims.size(); ++i)
    require(c.dims[i] >= 1, "basis dimension for '" + c.variables[i] + "' must be positive");
  for (std::size_t i = 0; i < c.variables.size(); ++i) {
    require(c.variables[i] != "time", "'time' is reserved for the time column");
    for (std::size_t j = 0; j < i; ++j)
      require(c.variables[i] != c.variables[j], "variable '" + c.variables[i] + "' is listed twice");
  }
  require(!c.duration || *c.duration > 0.0, "duration must be positive");
  for (const auto& [name, e] : c.endpoints) {
    require(c.variable_index(name) >= 0, "endpoint for unknown variable '" + name + "'");
    require(e.tolerance >= 0.0 && e.filter_tolerance() >= 0.0, "endpoint tolerances must be non-negative");
  }
  for (const auto& k : c.constraints) {
    require(c.variable_index(k.variable) >= 0, "constraint on unknown variable '" + k.variable + "'");
    require(k.per_seconds > 0.0, "per_seconds must be positive");
  }
  require(c.optimizer.nu_max > 0.0, "optimizer.nu_max must be positive");
  require(c.optimizer.bisection_iterations >= 0, "optimizer.bisection_iterations must be non-negative");
  require(c.optimizer.feasibility_slack >= 0.0, "optimizer.feasibility_slack must be non-negative");
  require(c.references.best_count >= 1, "references.best_count must be at least 1");
  require(c.references.weight_scheme != WeightScheme::user ||
              static_cast<int>(c.references.user_weights.size()) == c.references.best_count,
          "references.user_weights needs best_count entries");
  require(c.covariance.shrinkage >= 0.0 && c.covariance.shrinkage <= 1.0, "covariance.shrinkage must lie in [0, 1]");
  require(c.covariance.rank_rtol > 0.0, "covariance.rank_rtol must be positive");
  require(c.grid_size >= 2, "grid_size must be at least 2");
  require(c.confidence.level > 0.0 && c.confidence.level < 1.0, "confidence.level must lie in (0, 1)");
  require(!c.confidence.sigma || *c.confidence.sigma >= 0.0, "confidence.sigma must be non-negative");
  const auto D = static_cast<Eigen::Index>(c.variables.size());
  switch (c.cost.source) {
    case CostSource::explicit_quadratic:
      require(c.cost.quadratic.Q.rows() == D && c.cost.quadratic.Q.cols() == D && c.cost.quadratic.w.size() == D,
              "cost.Q must be DxD and cost.w of length D");
      break;
    case CostSource::fitted:
      require(!c.cost.target_column.empty(), "cost.target_column is required for a fitted cost");
      require(c.variable_index(c.cost.target_column) < 0, "cost.target_column must not be a state variable");
      break;
    case CostSource::force_field:
      require(c.cost.field.M.rows() == D && c.cost.field.M.cols() == D && c.cost.field.b.size() == D,
              "cost.M must be DxD and cost.b of length D");
      require(c.cost.field.alpha >= 0.0, "cost.alpha must be non-negative");
      break;
  }
}

namespace detail {

inline std::string csv_number(double v) { return csv::format_number(v); }

using json = nlohmann::json;

inline Eigen::MatrixXd matrix_from_json(const json& j, const std::string& key) {
  if (!j.is_array()) fail(ErrorCode::config, key + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      fail(ErrorCode::config, key + " rows must all have " + std::to_string(cols) + " entries");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

inline Eigen::VectorXd vector_from_json(const json& j, const std::string& key) {
  if (!j.is_array()) fail(ErrorCode::config, key + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline WeightScheme parse_weight_scheme(const std::string& s) {
  if (s == "uniform") return WeightScheme::uniform;
  if (s == "inverse-cost-rank") return WeightScheme::inverse_cost_rank;
  if (s == "user") return WeightScheme::user;
  fail(ErrorCode::config, "unknown weight scheme '" + s + "'");
}

inline ConstraintKind parse_constraint_kind(const std::string& s) {
  if (s == "upper-bound") return ConstraintKind::upper_bound;
  if (s == "lower-bound") return ConstraintKind::lower_bound;
  if (s == "derivative-upper-bound") return ConstraintKind::derivative_upper_bound;
  fail(ErrorCode::config, "unknown constraint kind '" + s + "'");
}

inline CostSource parse_cost_source(const std::string& s) {
  if (s == "explicit-quadratic") return CostSource::explicit_quadratic;
  if (s == "fitted") return CostSource::fitted;
  if (s == "force-field") return CostSource::force_field;
  fail(ErrorCode::config, "unknown cost source '" + s + "'");
}

}  // namespace detail

/// Parses a run configuration. Relative `data_dir`/`output_dir` are resolved
/// against `base_dir`.
inline RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  using detail::json;
  RunConfig c;
  try {
    auto resolve = [&](const std::string& p) {
      std::filesystem::path path(p);
      return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };
    c.data_dir = resolve(j.at("data_dir").get<std::string>());
    c.variables = j.at("variables").get<std::vector<std::string>>();
    const auto& basis = j.at("basis");
    const auto kind = basis.value("kind", std::string("legendre"));
    if (kind != "legendre") detail::fail(ErrorCode::config, "unknown basis kind '" + kind + "'");
    c.dims = basis.at("dims").get<std::vector<int>>();
    if (j.contains("duration") && !j["duration"].is_null()) c.duration = j["duration"].get<double>();
    if (j.contains("endpoints")) {
      for (const auto& [name, e] : j["endpoints"].items()) {
        EndpointSpec spec;
        spec.start = e.at("start").get<double>();
        spec.end = e.at("end").get<double>();
        spec.tolerance = e.value("tolerance", 0.0);
        if (e.contains("selection_tolerance")) spec.selection_tolerance = e["selection_tolerance"].get<double>();
        c.endpoints[name] = spec;
      }
    }
    if (j.contains("constraints")) {
      for (const auto& k : j["constraints"]) {
        ConstraintSpec spec;
        spec.kind = detail::parse_constraint_kind(k.at("kind").get<std::string>());
        spec.variable = k.at("variable").get<std::string>();
        spec.bound = k.at("bound").get<double>();
        spec.per_seconds = k.value("per_seconds", 1.0);
        spec.name = k.value("name", std::string());
        c.constraints.push_back(spec);
      }
    }
    const auto& cost = j.at("cost");
    c.cost.source = detail::parse_cost_source(cost.at("source").get<std::string>());
    switch (c.cost.source) {
      case CostSource::explicit_quadratic:
        c.cost.quadratic.Q = detail::matrix_from_json(cost.at("Q"), "cost.Q");
        c.cost.quadratic.w = detail::vector_from_json(cost.at("w"), "cost.w");
        c.cost.quadratic.r = cost.value("r", 0.0);
        break;
      case CostSource::fitted:
        c.cost.target_column = cost.at("target_column").get<std::string>();
        break;
      case CostSource::force_field:
        c.cost.field.M = detail::matrix_from_json(cost.at("M"), "cost.M");
        c.cost.field.b = detail::vector_from_json(cost.at("b"), "cost.b");
        c.cost.field.alpha = cost.value("alpha", 0.0);
        break;
    }
    if (j.contains("optimizer")) {
      const auto& o = j["optimizer"];
      c.optimizer.nu_max = o.value("nu_max", c.optimizer.nu_max);
      c.optimizer.bisection_iterations = o.value("bisection_iterations", c.optimizer.bisection_iterations);
      c.optimizer.feasibility_slack = o.value("feasibility_slack", c.optimizer.feasibility_slack);
    }
    if (j.contains("references")) {
      const auto& r = j["references"];
      c.references.best_count = r.value("best_count", c.references.best_count);
      c.references.weight_scheme = detail::parse_weight_scheme(r.value("weight_scheme", std::string("uniform")));
      if (r.contains("user_weights")) c.references.user_weights = r["user_weights"].get<std::vector<double>>();
    }
    if (j.contains("covariance")) {
      const auto& s = j["covariance"];
      c.covariance.shrinkage = s.value("shrinkage", c.covariance.shrinkage);
      c.covariance.rank_rtol = s.value("rank_rtol", c.covariance.rank_rtol);
    }
    c.grid_size = j.value("grid_size", c.grid_size);
    c.output_dir = resolve(j.value("output_dir", std::string("out")));
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("confidence")) {
      const auto& ci = j["confidence"];
      c.confidence.level = ci.value("level", c.confidence.level);
      if (ci.contains("sigma") && !ci["sigma"].is_null()) c.confidence.sigma = ci["sigma"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    detail::fail(ErrorCode::config, std::string("malformed configuration: ") + e.what());
  }
  validate(c);
  return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  using detail::json;
  json j;
  j["data_dir"] = c.data_dir.generic_string();
  j["variables"] = c.variables;
  j["basis"] = {{"kind", to_string(c.basis_kind)}, {"dims", c.dims}};
  j["duration"] = c.duration ? json(*c.duration) : json(nullptr);
  json endpoints = json::object();
  for (const auto& [name, e] : c.endpoints) {
    json spec = {{"start", e.start}, {"end", e.end}, {"tolerance", e.tolerance}};
    if (e.selection_tolerance) spec["selection_tolerance"] = *e.selection_tolerance;
    endpoints[name] = spec;
  }
  j["endpoints"] = endpoints;
  json constraints = json::array();
  for (const auto& k : c.constraints) {
    json spec = {{"kind", to_string(k.kind)}, {"variable", k.variable}, {"bound", k.bound}};
    if (k.kind == ConstraintKind::derivative_upper_bound) spec["per_seconds"] = k.per_seconds;
    if (!k.name.empty()) spec["name"] = k.name;
    constraints.push_back(spec);
  }
  j["constraints"] = constraints;
  json cost = {{"source", to_string(c.cost.source)}};
  switch (c.cost.source) {
    case CostSource::explicit_quadratic:
      cost["Q"] = detail::matrix_to_json(c.cost.quadratic.Q);
      cost["w"] = detail::vector_to_json(c.cost.quadratic.w);
      cost["r"] = c.cost.quadratic.r;
      break;
    case CostSource::fitted:
      cost["target_column"] = c.cost.target_column;
      break;
    case CostSource::force_field:
      cost["M"] = detail::matrix_to_json(c.cost.field.M);
      cost["b"] = detail::vector_to_json(c.cost.field.b);
      cost["alpha"] = c.cost.field.alpha;
      break;
  }
  j["cost"] = cost;
  j["optimizer"] = {{"nu_max", c.optimizer.nu_max},
                    {"bisection_iterations", c.optimizer.bisection_iterations},
                    {"feasibility_slack", c.optimizer.feasibility_slack}};
  json refs = {{"best_count", c.references.best_count}, {"weight_scheme", to_string(c.references.weight_scheme)}};
  if (!c.references.user_weights.empty()) refs["user_weights"] = c.references.user_weights;
  j["references"] = refs;
  j["covariance"] = {{"shrinkage", c.covariance.shrinkage}, {"rank_rtol", c.covariance.rank_rtol}};
  j["grid_size"] = c.grid_size;
  j["output_dir"] = c.output_dir.generic_string();
  j["seed"] = c.seed;
  j["confidence"] = {{"level", c.confidence.level},
                     {"sigma", c.confidence.sigma ? json(*c.confidence.sigma) : json(nullptr)}};
  return j;
}

/// Inequalities named in the configuration, over the variable order of `c`.
inline ConstraintSet build_constraint_set(const RunConfig& c, double slack = 0.0) {
  ConstraintSet set;
  set.grid_size = c.grid_size;
  set.slack = slack;
  const int D = static_cast<int>(c.variables.size());
  for (const auto& k : c.constraints) {
    const int d = c.variable_index(k.variable);
    detail::require(d >= 0, ErrorCode::config, "constraint on unknown variable '" + k.variable + "'");
    switch (k.kind) {
      case ConstraintKind::upper_bound:
        set.add_upper_bound(d, k.bound, k.name.empty() ? k.variable + " <= " + detail::csv_number(k.bound) : k.name);
        break;
      case ConstraintKind::lower_bound:
        set.add_lower_bound(d, k.bound, k.name.empty() ? k.variable + " >= " + detail::csv_number(k.bound) : k.name);
        break;
      case ConstraintKind::derivative_upper_bound:
        set.add_rate_upper_bound(d, D, k.bound / k.per_seconds,
                                 k.name.empty() ? "d" + k.variable + "/dt <= " + detail::csv_number(k.bound) + " per " +
                                                      detail::csv_number(k.per_seconds) + " s"
                                                : k.name);
        break;
    }
  }
  return set;
}

/// Endpoint conditions in variable order; variables without an entry are free.
inline EndpointConditions endpoint_conditions(const RunConfig& c) {
  const auto D = static_cast<Eigen::Index>(c.variables.size());
  EndpointConditions e{Eigen::VectorXd::Zero(D), Eigen::VectorXd::Zero(D), Eigen::VectorXd::Zero(D),
                       std::vector<bool>(static_cast<std::size_t>(D), false)};
  for (const auto& [name, spec] : c.endpoints) {
    const int d = c.variable_index(name);
    detail::require(d >= 0, ErrorCode::config, "endpoint for unknown variable '" + name + "'");
    e.start[d] = spec.start;
    e.end[d] = spec.end;
    e.tolerance[d] = spec.tolerance;
    e.constrained[static_cast<std::size_t>(d)] = true;
  }
  return e;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), ErrorCode::config, "cannot open configuration " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    detail::fail(ErrorCode::config, path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

}  // namespace trajopt

#endif  // TRAJOPT_CONFIG_HPP
