// Command-line front end: optimize, project, fit-cost, generate, report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trajopt/csv.hpp"
#include "trajopt/datagen.hpp"
#include "trajopt/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace trajopt;

namespace {

void write_json(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  detail::require(static_cast<bool>(out), ErrorCode::io, path + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

int cmd_optimize(const std::string& config_path, const std::string& output) {
  RunConfig config = load_config(config_path);
  if (!output.empty()) config.output_dir = output;
  const RunResult result = run_optimization(config);
  const auto paths = emit_outputs(result, config.output_dir);
  const auto& sol = result.search.solution;
  std::cout << "references accepted: " << result.accepted.size() << ", selected: " << result.selected.size() << '\n'
            << "nu* = " << result.search.nu << " (certified convex up to nu = "
            << (std::isfinite(result.weyl.nu_max()) ? csv::format_number(result.weyl.nu_max()) : "inf") << ")\n"
            << "optimised cost = " << sol.cost << ", mean saving = " << result.savings.percent_stats.mean << " %\n";
  if (result.confidence_interval) {
    std::cout << "confidence interval (" << config.confidence.level << "): [" << result.confidence_interval->first
              << ", " << result.confidence_interval->second << "]\n";
  }
  std::cout << "wrote " << paths.trajectory.string() << ", " << paths.summary.string() << ", " << paths.plot.string()
            << '\n';
  return 0;
}

int cmd_project(const std::string& input, const std::vector<std::string>& variables, const std::vector<int>& dims,
                double duration, const std::string& output) {
  detail::require(variables.size() == dims.size(), ErrorCode::config, "--variables and --dims differ in length");
  const auto table = csv::read(input);
  detail::require(table.header.front() == "time", ErrorCode::ingestion, input + ": first column must be 'time'");
  TrajectorySamples s;
  s.names = variables;
  s.values.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(variables.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) s.times.push_back(table.rows[r][0] - table.rows[0][0]);
  for (std::size_t d = 0; d < variables.size(); ++d) {
    const int col = table.column(variables[d]);
    detail::require(col >= 0, ErrorCode::ingestion, input + ": missing column '" + variables[d] + "'");
    for (std::size_t r = 0; r < table.rows.size(); ++r)
      s.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = table.rows[r][static_cast<std::size_t>(col)];
  }
  validate(s);
  const double T = duration > 0.0 ? duration : s.times.back();
  const auto basis = build_basis(BasisKind::legendre, dims, T);
  const auto c = project(s, basis);
  const auto rec = reconstruct(c, s.times);
  json coeffs = json::object();
  json rmse = json::object();
  for (std::size_t d = 0; d < variables.size(); ++d) {
    const auto dd = static_cast<int>(d);
    coeffs[variables[d]] = detail::vector_to_json(c.segment(dd));
    const double sq = (rec.values.col(dd) - s.values.col(dd)).squaredNorm();
    rmse[variables[d]] = std::sqrt(sq / static_cast<double>(s.size()));
  }
  write_json({{"duration", T}, {"dims", dims}, {"coefficients", coeffs}, {"projection_rmse", rmse}}, output);
  return 0;
}

int cmd_fit_cost(const std::string& data, const std::vector<std::string>& variables, const std::string& target,
                 const std::string& output) {
  RunConfig config;
  config.data_dir = data;
  config.variables = variables;
  config.dims.assign(variables.size(), 1);
  config.cost.source = CostSource::fitted;
  config.cost.target_column = target;
  const auto refs = read_references(config);
  const auto fit = fit_cost(refs);
  write_json({{"variables", variables},
              {"Q", detail::matrix_to_json(fit.cost.Q)},
              {"w", detail::vector_to_json(fit.cost.w)},
              {"r", fit.cost.r},
              {"residual_std", fit.residual_std},
              {"rmse", fit.rmse},
              {"mape_percent", fit.mape},
              {"samples", fit.samples},
              {"files", refs.names.size()}},
             output);
  return 0;
}

int cmd_generate(const std::string& scenario, const std::string& output, std::uint64_t seed, double alpha) {
  Scenario s = scenario == "forcefield" ? forcefield_scenario(alpha, seed) : make_scenario(scenario, seed);
  const auto path = write_scenario(s, output);
  std::cout << "generated " << s.generated.references.size() << " references in " << s.generated.attempts
            << " attempts (acceptance rate " << s.generated.acceptance_rate() << ")\n"
            << "configuration: " << path.string() << '\n';
  return 0;
}

int cmd_report(const std::string& summary_path) {
  const json j = load_summary(summary_path);
  const auto& opt = j.at("optimization");
  std::cout << "nu*        " << opt.at("nu").get<double>() << '\n'
            << "cost       " << opt.at("cost").get<double>() << '\n'
            << "penalty    " << opt.at("penalty").get<double>() << '\n'
            << "admissible " << (j.at("admissibility").at("admissible").get<bool>() ? "yes" : "no") << "\n\n";
  std::printf("%-10s %10s %10s %10s %10s %10s %10s %10s\n", "", "Mean", "Std", "Min", "Q1", "Q2", "Q3", "Max");
  for (const char* key : {"absolute_stats", "percent_stats"}) {
    const auto& s = j.at("savings").at(key);
    std::printf("%-10s %10.4g %10.4g %10.4g %10.4g %10.4g %10.4g %10.4g\n",
                key == std::string("percent_stats") ? "saving %" : "saving", s.at("mean").get<double>(),
                s.at("std").get<double>(), s.at("min").get<double>(), s.at("q1").get<double>(),
                s.at("q2").get<double>(), s.at("q3").get<double>(), s.at("max").get<double>());
  }
  if (!j.at("confidence_interval").is_null()) {
    const auto& ci = j["confidence_interval"];
    std::cout << "\nconfidence interval (" << ci.at("level").get<double>() << "): [" << ci.at("lower").get<double>()
              << ", " << ci.at("upper").get<double>() << "]\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reference-guided trajectory optimisation"};
  app.require_subcommand(1);

  std::string config_path, output;
  auto* optimize = app.add_subcommand("optimize", "Run the full optimisation from a configuration file");
  optimize->add_option("--config", config_path, "JSON run configuration")->required();
  optimize->add_option("--output", output, "Override the configured output directory");

  std::string input;
  std::vector<std::string> variables;
  std::vector<int> dims;
  double duration = 0.0;
  std::string proj_out = "-";
  auto* proj = app.add_subcommand("project", "Project one CSV trajectory onto the basis");
  proj->add_option("--input", input, "CSV file with a leading time column")->required();
  proj->add_option("--variables", variables, "Variables to project")->required()->delimiter(',');
  proj->add_option("--dims", dims, "Basis size per variable")->required()->delimiter(',');
  proj->add_option("--duration", duration, "Interval length (default: file duration)");
  proj->add_option("--output", proj_out, "Output JSON ('-' for stdout)");

  std::string data, target = "fuel_flow", fit_out = "-";
  std::vector<std::string> fit_vars;
  auto* fit = app.add_subcommand("fit-cost", "Fit a quadratic instantaneous cost to reference data");
  fit->add_option("--data", data, "Directory of reference CSV files")->required();
  fit->add_option("--variables", fit_vars, "State variables")->required()->delimiter(',');
  fit->add_option("--target", target, "Observed cost column");
  fit->add_option("--output", fit_out, "Output JSON ('-' for stdout)");

  std::string scenario, gen_out;
  std::uint64_t seed = 7;
  double alpha = 0.0;
  auto* gen = app.add_subcommand("generate", "Write a synthetic reference set and its configuration");
  gen->add_option("--scenario", scenario, "climb or forcefield")->required();
  gen->add_option("--output", gen_out, "Destination directory")->required();
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--alpha", alpha, "Kinetic weight for the forcefield scenario");

  std::string summary;
  auto* report = app.add_subcommand("report", "Print the savings table of a run summary");
  report->add_option("--summary", summary, "summary.json written by optimize")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*optimize) return cmd_optimize(config_path, output);
    if (*proj) return cmd_project(input, variables, dims, duration, proj_out);
    if (*fit) return cmd_fit_cost(data, fit_vars, target, fit_out);
    if (*gen) return cmd_generate(scenario, gen_out, seed, alpha);
    if (*report) return cmd_report(summary);
  } catch (const Error& e) {
    std::cerr << "error";
    if (!e.stage().empty()) std::cerr << " in " << e.stage();
    std::cerr << " (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error (config): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 5;
  }
  return 0;
}
