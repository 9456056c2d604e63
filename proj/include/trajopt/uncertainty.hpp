#ifndef TRAJOPT_UNCERTAINTY_HPP
#define TRAJOPT_UNCERTAINTY_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "trajopt/error.hpp"

namespace trajopt {

/// White-noise residual model: ∫ε dt over [0, T] is N(0, T σ²).
struct CostNoiseModel {
  double sigma = 0.0;
  double duration = 1.0;
};

inline void validate(const CostNoiseModel& m) {
  detail::require(std::isfinite(m.sigma) && m.sigma >= 0.0, ErrorCode::invalid_argument,
                  "noise standard deviation must be non-negative");
  detail::require(std::isfinite(m.duration) && m.duration > 0.0, ErrorCode::invalid_argument,
                  "noise horizon must be positive");
}

/// Standard normal quantile. Acklam's rational approximation followed by one
/// Halley refinement against erfc.
inline double normal_quantile(double p) {
  detail::require(p > 0.0 && p < 1.0, ErrorCode::invalid_argument, "probability must lie in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

/// Two-sided interval for the true integrated cost at confidence `level` = 1 − u.
inline std::pair<double, double> confidence_interval(double value, const CostNoiseModel& model,
                                                     double level = 0.95) {
  validate(model);
  const double u = 1.0 - level;
  detail::require(u > 0.0 && u < 1.0, ErrorCode::invalid_argument, "confidence level must lie in (0, 1)");
  const double half = normal_quantile(1.0 - 0.5 * u) * std::sqrt(model.duration) * model.sigma;
  return {value - half, value + half};
}

struct CoverageResult {
  int replications = 0;
  int covered = 0;
  double rate() const { return replications ? static_cast<double>(covered) / replications : 0.0; }
};

/// Monte Carlo coverage of `confidence_interval` under a discretised white
/// noise: `steps` i.i.d. increments with variance σ²/Δt, integrated by a
/// Riemann sum so the total has variance T σ².
inline CoverageResult simulate_coverage(double value, const CostNoiseModel& model, double level,
                                        int replications, int steps, unsigned long long seed) {
  validate(model);
  detail::require(replications > 0 && steps > 0, ErrorCode::invalid_argument,
                  "replications and steps must be positive");
  CoverageResult out{replications, 0};
  if (model.sigma == 0.0) {
    out.covered = replications;
    return out;
  }
  const double dt = model.duration / steps;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, model.sigma / std::sqrt(dt));
  for (int r = 0; r < replications; ++r) {
    double integral = 0.0;
    for (int j = 0; j < steps; ++j) integral += noise(rng) * dt;
    // Observed cost = true cost + integrated noise; the interval targets the truth.
    const auto [lo, hi] = confidence_interval(value + integral, model, level);
    if (lo <= value && value <= hi) ++out.covered;
  }
  return out;
}

}  // namespace trajopt

#endif  // TRAJOPT_UNCERTAINTY_HPP
