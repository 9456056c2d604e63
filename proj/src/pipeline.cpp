#include "trajopt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>

#include "trajopt/csv.hpp"

namespace trajopt {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(stage);
  }
}

std::string fmt(double v) { return csv::format_number(v); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(finite_or_null(v[i]));
  return out;
}

json to_json(const Statistics& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"q1", s.q1},
          {"q2", s.q2},     {"q3", s.q3},   {"max", s.max}};
}

TrajectorySamples padded(const TrajectorySamples& s, double T) {
  if (s.times.back() >= T) return s;
  TrajectorySamples out = s;
  out.times.push_back(T);
  out.values.conservativeResize(out.values.rows() + 1, Eigen::NoChange);
  out.values.row(out.values.rows() - 1) = s.values.row(s.values.rows() - 1);
  return out;
}

}  // namespace

double ReferenceData::max_duration() const {
  double T = 0.0;
  for (const auto& s : samples) T = std::max(T, s.times.back());
  return T;
}

ReferenceData read_references(const RunConfig& config) {
  validate(config);
  const fs::path& dir = config.data_dir;
  detail::require(fs::is_directory(dir), ErrorCode::ingestion, dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  detail::require(!files.empty(), ErrorCode::ingestion, dir.string() + ": no .csv files");

  const bool want_target = config.cost.source == CostSource::fitted;
  const auto conditions = endpoint_conditions(config);
  const auto D = static_cast<Eigen::Index>(config.variables.size());

  ReferenceData data;
  for (const auto& path : files) {
    const std::string file = path.filename().string();
    const auto table = csv::read(path);
    detail::require(table.header.front() == "time", ErrorCode::ingestion,
                    file + ": first column must be 'time', found '" + table.header.front() + "'");
    std::vector<int> cols;
    for (const auto& v : config.variables) {
      const int c = table.column(v);
      detail::require(c >= 0, ErrorCode::ingestion, file + ": missing column '" + v + "'");
      cols.push_back(c);
    }
    int target_col = -1;
    if (want_target) {
      target_col = table.column(config.cost.target_column);
      detail::require(target_col >= 0, ErrorCode::ingestion,
                      file + ": missing column '" + config.cost.target_column + "'");
    }
    detail::require(table.rows.size() >= 2, ErrorCode::ingestion, file + ": needs at least two samples");

    TrajectorySamples s;
    s.names = config.variables;
    s.values.resize(static_cast<Eigen::Index>(table.rows.size()), D);
    std::vector<double> target;
    const double t0 = table.rows.front()[0];
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      if (r > 0) {
        detail::require(row[0] > table.rows[r - 1][0], ErrorCode::ingestion,
                        file + ": time is not strictly increasing at data row " + std::to_string(r + 1));
      }
      s.times.push_back(row[0] - t0);
      for (Eigen::Index d = 0; d < D; ++d) s.values(static_cast<Eigen::Index>(r), d) = row[static_cast<std::size_t>(cols[static_cast<std::size_t>(d)])];
      if (target_col >= 0) target.push_back(row[static_cast<std::size_t>(target_col)]);
    }
    detail::require(s.values.allFinite(), ErrorCode::ingestion, file + ": non-finite value");

    IngestionRecord rec;
    rec.file = file;
    rec.duration = s.times.back();
    rec.samples = s.size();
    rec.accepted = true;
    for (Eigen::Index d = 0; d < D && rec.accepted; ++d) {
      if (!conditions.is_constrained(static_cast<int>(d))) continue;
      const auto& spec = config.endpoints.at(config.variables[static_cast<std::size_t>(d)]);
      const double tol = spec.filter_tolerance();
      const double first = s.values(0, d), last = s.values(s.size() - 1, d);
      const auto& name = config.variables[static_cast<std::size_t>(d)];
      if (std::abs(first - spec.start) > tol) {
        rec.accepted = false;
        rec.reason = name + " starts at " + fmt(first) + ", outside " + fmt(spec.start) + " +/- " + fmt(tol);
      } else if (std::abs(last - spec.end) > tol) {
        rec.accepted = false;
        rec.reason = name + " ends at " + fmt(last) + ", outside " + fmt(spec.end) + " +/- " + fmt(tol);
      }
    }
    data.report.push_back(rec);
    if (!rec.accepted) continue;
    data.names.push_back(file);
    data.samples.push_back(std::move(s));
    data.targets.push_back(std::move(target));
  }
  detail::require(!data.samples.empty(), ErrorCode::ingestion,
                  dir.string() + ": no reference satisfies the endpoint conditions (" +
                      std::to_string(files.size()) + " files rejected)");
  return data;
}

void project_references(ReferenceData& data, const BasisSpec& basis) {
  const auto n = static_cast<Eigen::Index>(data.samples.size());
  data.references = ReferenceSet{};
  data.references.basis = basis;
  data.references.coefficients.resize(basis.total_size(), n);
  data.references.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(std::max<Eigen::Index>(1, n)));
  data.references.names = data.names;
  const double T = basis.duration;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = data.samples[static_cast<std::size_t>(i)];
    CoefficientVector c;
    try {
      c = project(padded(s, T), basis);
    } catch (const Error& e) {
      throw Error(ErrorCode::ingestion, data.names[static_cast<std::size_t>(i)] + ": " + e.what());
    }
    data.references.coefficients.col(i) = c.values;

    std::vector<double> times;
    for (double t : s.times)
      if (t <= T) times.push_back(t);
    const auto rec = reconstruct(c, times);
    std::vector<double> rmse(static_cast<std::size_t>(s.dimension_count()), 0.0);
    for (Eigen::Index d = 0; d < s.dimension_count(); ++d) {
      const auto m = static_cast<Eigen::Index>(times.size());
      const double sq = (rec.values.col(d) - s.values.col(d).head(m)).squaredNorm();
      rmse[static_cast<std::size_t>(d)] = std::sqrt(sq / static_cast<double>(m));
    }
    for (auto& r : data.report)
      if (r.file == data.names[static_cast<std::size_t>(i)]) r.projection_rmse = rmse;
  }
}

ReferenceData load_references(const RunConfig& config, std::optional<double> duration) {
  ReferenceData data = read_references(config);
  const double T = duration ? *duration : config.duration ? *config.duration : data.max_duration();
  project_references(data, build_basis(config.basis_kind, config.dims, T));
  return data;
}

double quantile(std::vector<double> values, double p) {
  detail::require(!values.empty(), ErrorCode::invalid_argument, "quantile of an empty sample");
  detail::require(p >= 0.0 && p <= 1.0, ErrorCode::invalid_argument, "quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Statistics describe(const std::vector<double>& values) {
  detail::require(!values.empty(), ErrorCode::invalid_argument, "statistics of an empty sample");
  Statistics s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.q1 = quantile(values, 0.25);
  s.q2 = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  return s;
}

SavingsReport savings_report(double optimized_cost, const std::vector<double>& reference_costs) {
  detail::require(!reference_costs.empty(), ErrorCode::invalid_argument, "savings need at least one reference cost");
  SavingsReport r;
  for (std::size_t i = 0; i < reference_costs.size(); ++i) {
    const double ref = reference_costs[i];
    detail::require(ref != 0.0, ErrorCode::division_domain,
                    "reference " + std::to_string(i) + " has zero cost; percentage saving undefined");
    r.absolute.push_back(ref - optimized_cost);
    r.percent.push_back(100.0 * (ref - optimized_cost) / ref);
  }
  r.absolute_stats = describe(r.absolute);
  r.percent_stats = describe(r.percent);
  return r;
}

std::optional<double> find_first_hit(const TrajectorySamples& samples, const std::vector<int>& dims,
                                     const Eigen::VectorXd& targets, const Eigen::VectorXd& tolerances) {
  detail::require(targets.size() == static_cast<Eigen::Index>(dims.size()) && tolerances.size() == targets.size(),
                  ErrorCode::invalid_argument, "one target and tolerance per dimension is required");
  for (int d : dims)
    detail::require(d >= 0 && d < samples.values.cols(), ErrorCode::invalid_argument, "target dimension out of range");
  for (Eigen::Index i = 0; i < samples.values.rows(); ++i) {
    bool hit = true;
    for (std::size_t j = 0; j < dims.size() && hit; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      hit = std::abs(samples.values(i, dims[j]) - targets[jj]) <= tolerances[jj];
    }
    if (hit) return samples.times[static_cast<std::size_t>(i)];
  }
  return std::nullopt;
}

AssembledQuadraticCost assemble_cost(const RunConfig& config, const std::optional<QuadraticFit>& fit,
                                     const BasisSpec& basis) {
  switch (config.cost.source) {
    case CostSource::explicit_quadratic: return assemble_quadratic(config.cost.quadratic, basis);
    case CostSource::fitted:
      detail::require(fit.has_value(), ErrorCode::invalid_argument, "fitted cost requested without a fit");
      return assemble_quadratic(fit->cost, basis);
    case CostSource::force_field: return assemble_forcefield(config.cost.field, basis);
  }
  detail::fail(ErrorCode::config, "unknown cost source");
}

QuadraticFit fit_cost(const ReferenceData& data) {
  Eigen::Index rows = 0;
  for (const auto& t : data.targets) rows += static_cast<Eigen::Index>(t.size());
  detail::require(rows > 0, ErrorCode::insufficient_data, "no target values to fit a cost");
  const auto D = data.samples.front().dimension_count();
  Eigen::MatrixXd X(rows, D);
  Eigen::VectorXd y(rows);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto m = static_cast<Eigen::Index>(data.targets[i].size());
    X.middleRows(r, m) = data.samples[i].values;
    y.segment(r, m) = Eigen::Map<const Eigen::VectorXd>(data.targets[i].data(), m);
    r += m;
  }
  return fit_quadratic_cost(X, y);
}

RunResult run_optimization(const RunConfig& config) {
  RunResult out;
  out.config = config;
  in_stage("config", [&] { validate(config); });

  ReferenceData data = in_stage("ingest", [&] { return read_references(config); });
  if (config.cost.source == CostSource::fitted) out.fit = in_stage("cost", [&] { return fit_cost(data); });

  const auto n = data.samples.size();
  const std::size_t best_count = std::min<std::size_t>(static_cast<std::size_t>(config.references.best_count), n);
  auto rank = [&](const std::vector<double>& costs) {
    std::vector<std::size_t> order(costs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
    order.resize(best_count);
    return order;
  };

  // Without a configured horizon, rank each file on its own duration and use
  // the longest of the selected ones.
  double T = 0.0;
  if (config.duration) {
    T = *config.duration;
  } else {
    T = in_stage("select", [&] {
      std::vector<double> own(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& s = data.samples[i];
        const auto b = build_basis(config.basis_kind, config.dims, s.times.back());
        own[i] = assemble_cost(config, out.fit, b)(project(s, b).values);
      }
      double longest = 0.0;
      for (auto i : rank(own)) longest = std::max(longest, data.samples[i].times.back());
      return longest;
    });
  }
  out.basis = in_stage("ingest", [&] { return build_basis(config.basis_kind, config.dims, T); });
  in_stage("ingest", [&] { project_references(data, out.basis); });
  out.ingestion = data.report;
  out.accepted = data.names;

  const auto cost = in_stage("cost", [&] { return assemble_cost(config, out.fit, out.basis); });
  const auto& all = data.references;
  for (Eigen::Index i = 0; i < all.size(); ++i) out.reference_costs.push_back(cost(all.coefficients.col(i)));

  const auto best = rank(out.reference_costs);
  ReferenceSet selected = all.subset(best);
  for (auto i : best) {
    out.selected.push_back(data.names[i]);
    out.selected_costs.push_back(out.reference_costs[i]);
  }
  selected.costs = out.selected_costs;
  selected.weights = in_stage("select", [&] {
    return compute_weights(best.size(), config.references.weight_scheme, out.selected_costs,
                           config.references.user_weights);
  });
  out.selected_weights = selected.weights;

  const auto sys = in_stage("endpoints", [&] { return endpoint_system(out.basis, endpoint_conditions(config)); });
  const Eigen::MatrixXd sigma = in_stage("covariance", [&] {
    const auto model = estimate_covariance(all.coefficients, config.covariance.shrinkage, config.covariance.rank_rtol);
    return project_to_kernel(model.matrix, sys.A, sys.row_labels);
  });
  auto dec = in_stage("decompose", [&] {
    return std::make_shared<const SubspaceDecomposition>(
        decompose(sigma, sys, selected.coefficients, config.covariance.rank_rtol));
  });
  out.covariance_rank = dec->sigma;
  out.free_dimension = dec->sigma;
  out.pinned_middle = dec->middle_size();
  out.pinned_endpoint = dec->a;
  out.commutation_residual = dec->commutation_residual;
  out.pinned2_spread = dec->pinned2_spread;

  const auto reduced = in_stage("reduce", [&] { return reduce_cost(cost, *dec); });
  out.weyl = in_stage("weyl", [&] { return weyl_certificate(reduced.Q, dec->lambda[0], 1.0 / config.optimizer.nu_max); });

  const ConstraintSet limits = build_constraint_set(config, config.optimizer.feasibility_slack);
  const auto grid = uniform_grid(T, config.grid_size);
  const double endpoint_slack = 1e-8 * std::max(1.0, sys.gamma.size() ? sys.gamma.cwiseAbs().maxCoeff() : 0.0);
  auto check = [&](const Solution& s) {
    auto report = check_constraints(reconstruct(CoefficientVector{out.basis, s.c}, grid), limits);
    const bool ends = endpoints_satisfied(sys, s.c, endpoint_slack);
    report.names.push_back("endpoints");
    report.worst.push_back(endpoint_residual(sys, s.c));
    report.worst_time.push_back(T);
    report.admissible = report.admissible && ends;
    return report;
  };
  auto build = [&](double nu) { return build_map_problem(reduced, dec, selected, nu, sys); };
  out.search = in_stage("tune_nu", [&] {
    return tune_nu(build, check, config.optimizer.nu_max, config.optimizer.bisection_iterations);
  });
  out.weyl.kappa = out.search.nu > 0.0 ? 1.0 / out.search.nu : std::numeric_limits<double>::infinity();
  out.weyl.certified = out.weyl.kappa >= out.weyl.kappa_min;

  in_stage("report", [&] {
    const auto& sol = out.search.solution;
    const CoefficientVector cstar{out.basis, sol.c};
    out.trajectory = reconstruct(cstar, grid, config.variables);
    for (double t : grid) {
      const Eigen::VectorXd y = evaluate(out.basis, sol.c, t);
      double f = 0.0;
      switch (config.cost.source) {
        case CostSource::explicit_quadratic: f = config.cost.quadratic(y); break;
        case CostSource::fitted: f = out.fit->cost(y); break;
        case CostSource::force_field: {
          const Eigen::VectorXd dy = evaluate_derivative(out.basis, sol.c, t);
          f = config.cost.field.alpha * dy.squaredNorm() - config.cost.field.field(y).dot(dy);
          break;
        }
      }
      out.instantaneous_cost.push_back(f);
    }
    out.savings = savings_report(sol.cost, out.reference_costs);

    out.confidence_sigma = config.confidence.sigma;
    if (!out.confidence_sigma && out.fit) out.confidence_sigma = out.fit->residual_std;
    if (out.confidence_sigma) {
      out.confidence_interval =
          confidence_interval(sol.cost, CostNoiseModel{*out.confidence_sigma, T}, config.confidence.level);
    }

    const auto cond = endpoint_conditions(config);
    std::vector<int> dims;
    std::vector<double> targets, tols;
    for (int d = 0; d < out.basis.dimension_count(); ++d) {
      if (!cond.is_constrained(d)) continue;
      dims.push_back(d);
      targets.push_back(cond.end[d]);
      tols.push_back(cond.tolerance[d] + 1e-9 * std::max(1.0, std::abs(cond.end[d])));
    }
    if (!dims.empty()) {
      out.first_hit = find_first_hit(out.trajectory, dims,
                                     Eigen::Map<Eigen::VectorXd>(targets.data(), static_cast<Eigen::Index>(targets.size())),
                                     Eigen::Map<Eigen::VectorXd>(tols.data(), static_cast<Eigen::Index>(tols.size())));
    }
    for (Eigen::Index i = 0; i < selected.size(); ++i) {
      out.selected_trajectories.push_back(
          reconstruct(CoefficientVector{out.basis, selected.coefficients.col(i)}, grid, config.variables));
    }
  });
  return out;
}

json summary_json(const RunResult& r) {
  json j;
  j["config"] = config_to_json(r.config);
  j["duration"] = r.basis.duration;
  j["basis"] = {{"kind", to_string(r.basis.kind)}, {"dims", r.basis.dims}, {"size", r.basis.total_size()}};

  json files = json::array();
  int accepted = 0;
  for (const auto& rec : r.ingestion) {
    json f = {{"file", rec.file}, {"accepted", rec.accepted}, {"duration", rec.duration}, {"samples", rec.samples}};
    if (!rec.accepted) f["reason"] = rec.reason;
    if (!rec.projection_rmse.empty()) f["projection_rmse"] = rec.projection_rmse;
    accepted += rec.accepted;
    files.push_back(std::move(f));
  }
  j["ingestion"] = {{"files", files},
                    {"accepted", accepted},
                    {"rejected", static_cast<int>(r.ingestion.size()) - accepted}};
  j["selection"] = {{"references", r.selected}, {"weights", to_json(r.selected_weights)}, {"costs", r.selected_costs}};
  if (r.fit) {
    j["cost_fit"] = {{"Q", detail::matrix_to_json(r.fit->cost.Q)},
                     {"w", detail::vector_to_json(r.fit->cost.w)},
                     {"r", r.fit->cost.r},
                     {"residual_std", r.fit->residual_std},
                     {"rmse", r.fit->rmse},
                     {"mape_percent", r.fit->mape},
                     {"samples", r.fit->samples}};
  }
  j["decomposition"] = {{"free_dimension", r.free_dimension},
                        {"pinned_by_covariance", r.pinned_middle},
                        {"pinned_by_endpoints", r.pinned_endpoint},
                        {"commutation_residual", r.commutation_residual},
                        {"pinned_spread", r.pinned2_spread}};
  j["weyl"] = {{"rho", r.weyl.rho},
               {"lambda1", r.weyl.lambda1},
               {"kappa_min", r.weyl.kappa_min},
               {"nu_certified_max", finite_or_null(r.weyl.nu_max())},
               {"kappa", finite_or_null(r.weyl.kappa)},
               {"certified", r.weyl.certified}};

  const auto& sol = r.search.solution;
  json steps = json::array();
  for (const auto& s : r.search.history) {
    json step = {{"nu", s.nu}, {"admissible", s.admissible}};
    if (!s.note.empty()) step["note"] = s.note;
    steps.push_back(std::move(step));
  }
  j["optimization"] = {{"nu", r.search.nu},
                       {"kappa", finite_or_null(r.search.nu > 0.0 ? 1.0 / r.search.nu
                                                                  : std::numeric_limits<double>::infinity())},
                       {"objective", sol.objective},
                       {"cost", sol.cost},
                       {"penalty", sol.penalty},
                       {"method", sol.diagnostics.method},
                       {"local", sol.diagnostics.local},
                       {"iterations", sol.diagnostics.iterations},
                       {"kkt_residual", sol.diagnostics.kkt_residual},
                       {"active_set", sol.diagnostics.active_set},
                       {"search", steps},
                       {"coefficients", to_json(sol.c)}};
  json cons = json::array();
  for (std::size_t i = 0; i < sol.admissibility.names.size(); ++i) {
    cons.push_back({{"name", sol.admissibility.names[i]},
                    {"worst", finite_or_null(sol.admissibility.worst[i])},
                    {"at", sol.admissibility.worst_time[i]}});
  }
  j["admissibility"] = {{"admissible", sol.admissibility.admissible}, {"constraints", cons}};
  j["savings"] = {{"absolute", r.savings.absolute},
                  {"percent", r.savings.percent},
                  {"absolute_stats", to_json(r.savings.absolute_stats)},
                  {"percent_stats", to_json(r.savings.percent_stats)},
                  {"reference_costs", r.reference_costs}};
  if (r.confidence_interval) {
    j["confidence_interval"] = {{"level", r.config.confidence.level},
                                {"sigma", *r.confidence_sigma},
                                {"lower", r.confidence_interval->first},
                                {"upper", r.confidence_interval->second}};
  } else {
    j["confidence_interval"] = nullptr;
  }
  j["first_hit"] = r.first_hit ? json(*r.first_hit) : json(nullptr);
  return j;
}

OutputPaths emit_outputs(const RunResult& r, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  detail::require(!ec, ErrorCode::io, directory.string() + ": " + ec.message());
  OutputPaths paths{directory / "trajectory.csv", directory / "summary.json", directory / "plot.csv"};

  csv::Table traj;
  traj.header.push_back("time");
  for (const auto& v : r.config.variables) traj.header.push_back(v);
  traj.header.push_back("instantaneous_cost");
  for (std::size_t i = 0; i < r.trajectory.times.size(); ++i) {
    std::vector<double> row{r.trajectory.times[i]};
    for (Eigen::Index d = 0; d < r.trajectory.values.cols(); ++d)
      row.push_back(r.trajectory.values(static_cast<Eigen::Index>(i), d));
    row.push_back(r.instantaneous_cost[i]);
    traj.rows.push_back(std::move(row));
  }
  csv::write(paths.trajectory, traj);

  {
    std::ofstream out(paths.summary, std::ios::binary);
    detail::require(static_cast<bool>(out), ErrorCode::io, paths.summary.string() + ": cannot open for writing");
    out << summary_json(r).dump(2) << '\n';
    detail::require(static_cast<bool>(out), ErrorCode::io, paths.summary.string() + ": write failed");
  }

  std::ofstream plot(paths.plot, std::ios::binary);
  detail::require(static_cast<bool>(plot), ErrorCode::io, paths.plot.string() + ": cannot open for writing");
  plot << "series,time";
  for (const auto& v : r.config.variables) plot << ',' << v;
  plot << '\n';
  auto emit = [&](const std::string& label, const TrajectorySamples& s) {
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      plot << label << ',' << fmt(s.times[i]);
      for (Eigen::Index d = 0; d < s.values.cols(); ++d) plot << ',' << fmt(s.values(static_cast<Eigen::Index>(i), d));
      plot << '\n';
    }
  };
  emit("optimized", r.trajectory);
  for (std::size_t i = 0; i < r.selected_trajectories.size(); ++i) emit(r.selected[i], r.selected_trajectories[i]);
  detail::require(static_cast<bool>(plot), ErrorCode::io, paths.plot.string() + ": write failed");
  return paths;
}

json load_summary(const fs::path& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), ErrorCode::io, path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    detail::fail(ErrorCode::io, path.string() + ": " + e.what());
  }
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::config:
    case ErrorCode::invalid_argument:
      return 2;
    case ErrorCode::ingestion:
    case ErrorCode::io:
    case ErrorCode::coverage:
    case ErrorCode::insufficient_data:
      return 3;
    case ErrorCode::no_admissible_solution:
      return 4;
    default:
      return 5;
  }
}

}  // namespace trajopt
