#ifndef TRAJOPT_ERROR_HPP
#define TRAJOPT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace trajopt {

enum class ErrorCode {
  invalid_argument,
  out_of_domain,
  coverage,
  constraint_evaluation,
  insufficient_data,
  rank_deficient,
  model_mismatch,
  degenerate_problem,
  unbounded,
  no_admissible_solution,
  generation_starved,
  collinearity,
  division_domain,
  ingestion,
  config,
  io,
  numerical,
};

inline constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::out_of_domain: return "out-of-domain";
    case ErrorCode::coverage: return "coverage";
    case ErrorCode::constraint_evaluation: return "constraint-evaluation";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::rank_deficient: return "rank-deficient";
    case ErrorCode::model_mismatch: return "model-mismatch";
    case ErrorCode::degenerate_problem: return "degenerate-problem";
    case ErrorCode::unbounded: return "unbounded";
    case ErrorCode::no_admissible_solution: return "no-admissible-solution";
    case ErrorCode::generation_starved: return "generation-starved";
    case ErrorCode::collinearity: return "collinearity";
    case ErrorCode::division_domain: return "division-domain";
    case ErrorCode::ingestion: return "ingestion";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
    case ErrorCode::numerical: return "numerical";
  }
  return "unknown";
}

/// Every failure raised by the library. `stage()` is filled in by the
/// pipeline when an error crosses an orchestration boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string stage = {})
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

  Error with_stage(std::string stage) const {
    return Error(code_, what(), std::move(stage));
  }

 private:
  ErrorCode code_;
  std::string stage_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace detail
}  // namespace trajopt

#endif  // TRAJOPT_ERROR_HPP
