#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scalelaw/records.hpp"

namespace scalelaw {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Space in which goodness-of-fit residuals are measured.
enum class ResidualSpace { log, linear };

const char* to_token(ResidualSpace s);
ResidualSpace parse_residual_space(const std::string& token);

/// Power law y = exp(beta) * x^alpha fitted by least squares on (ln x, ln y).
struct FitResult {
  double alpha = 0.0;
  double beta = 0.0;
  double r_squared = 1.0;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  std::size_t n_points = 0;
  ResidualSpace residual_space = ResidualSpace::log;
  /// Set when the fit only used records with depth >= min_depth.
  std::optional<std::int64_t> min_depth;

  friend bool operator==(const FitResult&, const FitResult&) = default;
};

/// Slope and intercept only; the hot path inside bootstrap replicates.
struct LineCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Closed-form OLS on already-logged coordinates. Returns nullopt when fewer
/// than two distinct abscissae are present.
std::optional<LineCoefficients> fit_log_line(std::span<const double> log_x,
                                             std::span<const double> log_y);

/// Throws DataError on nonpositive coordinates or < 2 distinct x values.
FitResult fit_line(std::span<const Point> points, ResidualSpace space = ResidualSpace::log);

struct GoodnessOfFit {
  double ss_res = 0.0;
  double ss_tot = 0.0;
  /// nullopt when ss_tot = 0 but ss_res > 0 (R^2 undefined).
  std::optional<double> r_squared;
};

GoodnessOfFit goodness_of_fit(std::span<const Point> points, double alpha, double beta,
                              ResidualSpace space);

/// 1 - SS_res/SS_tot of the given line; nullopt when undefined.
std::optional<double> r_squared(std::span<const Point> points, const FitResult& fit,
                                ResidualSpace space);

/// exp(beta) * x^alpha.
double predict_at(const FitResult& fit, double x);
double predict_at(const LineCoefficients& line, double x);

/// All M*T points of a run set, x = params and y = metric value.
std::vector<Point> points_of(const RunSet& set);

FitResult fit_runset(const RunSet& set, ResidualSpace space = ResidualSpace::log);

/// Fit restricted to records with depth >= min_layers.
FitResult fit_filtered(const RunSet& set, std::int64_t min_layers,
                       ResidualSpace space = ResidualSpace::log);

}  // namespace scalelaw
