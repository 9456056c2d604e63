#ifndef TRAJOPT_PIPELINE_HPP
#define TRAJOPT_PIPELINE_HPP

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "trajopt/config.hpp"
#include "trajopt/cost.hpp"
#include "trajopt/optimizer.hpp"
#include "trajopt/refstats.hpp"
#include "trajopt/trajectory.hpp"
#include "trajopt/uncertainty.hpp"

namespace trajopt {

struct IngestionRecord {
  std::string file;
  bool accepted = false;
  std::string reason;  // why a file was rejected
  double duration = 0.0;
  Eigen::Index samples = 0;
  std::vector<double> projection_rmse;  // per variable, at the file's own sample times
};

/// Parsed reference files. Times are shifted so every trajectory starts at 0.
struct ReferenceData {
  std::vector<std::string> names;          // accepted files, sorted
  std::vector<TrajectorySamples> samples;  // accepted files
  std::vector<std::vector<double>> targets;  // observed instantaneous cost, when configured
  std::vector<IngestionRecord> report;     // every file, sorted
  ReferenceSet references;                 // projected onto `references.basis`

  double max_duration() const;
};

/// Reads every *.csv in the configured data directory (filename order),
/// checks columns and time ordering, and applies the endpoint filter.
ReferenceData read_references(const RunConfig& config);

/// Projects the accepted samples onto `basis` (holding the last row when a
/// file ends before T) and fills the per-file projection RMSE.
void project_references(ReferenceData& data, const BasisSpec& basis);

/// read_references + project_references on T = `duration`, the configured
/// duration, or the longest accepted file, in that order of preference.
ReferenceData load_references(const RunConfig& config, std::optional<double> duration = std::nullopt);

struct Statistics {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n − 1)
  double min = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Quantile with linear interpolation between order statistics (inclusive).
double quantile(std::vector<double> values, double p);
Statistics describe(const std::vector<double>& values);

struct SavingsReport {
  std::vector<double> absolute;  // reference − optimised
  std::vector<double> percent;   // 100 (reference − optimised) / reference
  Statistics absolute_stats;
  Statistics percent_stats;
};

SavingsReport savings_report(double optimized_cost, const std::vector<double>& reference_costs);

/// Earliest sample time at which every listed dimension is within tolerance
/// of its target.
std::optional<double> find_first_hit(const TrajectorySamples& samples, const std::vector<int>& dims,
                                     const Eigen::VectorXd& targets, const Eigen::VectorXd& tolerances);

/// Cost functional on a basis for the configured source; `fit` is required
/// for fitted costs.
AssembledQuadraticCost assemble_cost(const RunConfig& config, const std::optional<QuadraticFit>& fit,
                                     const BasisSpec& basis);

/// Least-squares quadratic cost from the accepted samples and their target column.
QuadraticFit fit_cost(const ReferenceData& data);

struct RunResult {
  RunConfig config;
  BasisSpec basis;
  std::vector<IngestionRecord> ingestion;
  std::vector<std::string> accepted;
  std::vector<std::string> selected;
  Eigen::VectorXd selected_weights;
  std::vector<double> selected_costs;
  std::vector<double> reference_costs;  // every accepted reference
  std::optional<QuadraticFit> fit;
  int covariance_rank = 0;
  int free_dimension = 0;
  int pinned_middle = 0;
  int pinned_endpoint = 0;
  double commutation_residual = 0.0;
  double pinned2_spread = 0.0;
  WeylReport weyl;
  NuSearchResult search;
  SavingsReport savings;
  std::optional<std::pair<double, double>> confidence_interval;
  std::optional<double> confidence_sigma;
  std::optional<double> first_hit;
  TrajectorySamples trajectory;             // optimised, on the output grid
  std::vector<double> instantaneous_cost;   // along `trajectory`
  std::vector<TrajectorySamples> selected_trajectories;  // reconstructed best references
};

/// ingest → fit/assemble cost → select → covariance → decompose → reduce →
/// certificate → ν search → reports. Errors carry the failing stage.
RunResult run_optimization(const RunConfig& config);

struct OutputPaths {
  std::filesystem::path trajectory;
  std::filesystem::path summary;
  std::filesystem::path plot;
};

nlohmann::json summary_json(const RunResult& result);
OutputPaths emit_outputs(const RunResult& result, const std::filesystem::path& directory);
nlohmann::json load_summary(const std::filesystem::path& path);

/// Process exit status for an error category.
int exit_code(ErrorCode code);

}  // namespace trajopt

#endif  // TRAJOPT_PIPELINE_HPP
