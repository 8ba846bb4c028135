#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scalelaw/bootstrap.hpp"
#include "scalelaw/powerlaw.hpp"
#include "scalelaw/records.hpp"

namespace scalelaw {

/// Default R^2 gate for trusting an extrapolated comparison.
inline constexpr double kDefaultR2Threshold = 0.95;

/// Mean relative error (1/k) * sum |y - yhat| / y, as a fraction.
double mre(std::span<const double> actual, std::span<const double> predicted);

/// Signed relative error (actual - predicted) / actual. Negative means the
/// prediction overshoots.
double re(double actual, double predicted);

/// Inclusive depth range, e.g. 1-6.
struct LayerRange {
  std::int64_t lo = 1;
  std::int64_t hi = 1;

  bool overlaps(const LayerRange& o) const { return lo <= o.hi && o.lo <= hi; }
  friend bool operator==(const LayerRange&, const LayerRange&) = default;
};

/// Parses "A-B" or a single "A".
LayerRange parse_layer_range(const std::string& text);

struct PredictionTarget {
  double x = 0.0;
  std::optional<double> actual;

  friend bool operator==(const PredictionTarget&, const PredictionTarget&) = default;
};

struct PredictionReport {
  FitResult fit;
  std::vector<PredictionTarget> targets;
  std::vector<double> predictions;
  /// Over targets that carry an actual value; nullopt when none do.
  std::optional<double> mre;
  std::vector<std::optional<double>> re;
  /// One entry per target when a bootstrap band was computed.
  std::vector<BandPoint> band_at_targets;

  std::size_t k() const { return targets.size(); }
  friend bool operator==(const PredictionReport&, const PredictionReport&) = default;
};

/// Fit on the train depths, predict the per-scale mean at each test depth.
PredictionReport holdout_eval(const RunSet& set, const LayerRange& train, const LayerRange& test);

/// Point prediction and bootstrap band at one target configuration.
PredictionReport extrapolate(const RunSet& set, const ScaleSpec& target, const BootstrapConfig& cfg,
                             std::optional<double> actual = std::nullopt);

struct SelectionReport {
  std::string family_a;
  std::string family_b;
  FitResult fit_a;
  FitResult fit_b;
  double r2_threshold = kDefaultR2Threshold;
  bool gate_passed_a = false;
  bool gate_passed_b = false;
  double target_x = 0.0;
  double prediction_a = 0.0;
  double prediction_b = 0.0;
  BandPoint band_a;
  BandPoint band_b;
  /// prediction_b - prediction_a; positive favors family_b.
  double predicted_gap = 0.0;
  std::optional<double> actual_gap;
  std::optional<bool> sign_agreement;

  /// False when either family fails the R^2 gate.
  bool reliable() const { return gate_passed_a && gate_passed_b; }
  friend bool operator==(const SelectionReport&, const SelectionReport&) = default;
};

bool gate_passes(const FitResult& fit, double r2_threshold);

/// True iff both gaps are >= 0 or both < 0.
bool same_sign(double predicted_gap, double actual_gap);

SelectionReport select_model(const RunSet& a, const RunSet& b, const ScaleSpec& target,
                             double r2_threshold, const BootstrapConfig& cfg,
                             std::optional<double> actual_a = std::nullopt,
                             std::optional<double> actual_b = std::nullopt);

}  // namespace scalelaw
