#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scalelaw/powerlaw.hpp"
#include "scalelaw/records.hpp"

namespace scalelaw {

enum class BootstrapMode { hierarchical, naive };

const char* to_token(BootstrapMode m);
BootstrapMode parse_bootstrap_mode(const std::string& token);

struct BootstrapConfig {
  std::size_t replicates = 1000;
  double lo_pct = 2.5;
  double hi_pct = 97.5;
  BootstrapMode mode = BootstrapMode::hierarchical;
  std::uint64_t rng_seed = 0;
  /// Consecutive degenerate draws tolerated per replicate before aborting.
  std::size_t max_redraws = 100;
  /// OpenMP thread count for the replicate loop; 0 = runtime default,
  /// 1 = serial reference path. Never changes the output.
  int threads = 0;
};

/// Throws UsageError when the configuration is out of range.
void validate(const BootstrapConfig& cfg);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double v) const { return lo <= v && v <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct BandPoint {
  double x = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;

  friend bool operator==(const BandPoint&, const BandPoint&) = default;
};

struct BootstrapBand {
  Interval slope_ci;
  Interval intercept_ci;
  std::vector<BandPoint> point_band;
  std::size_t replicates_used = 0;
  std::vector<double> replicate_slopes;
  std::vector<double> replicate_intercepts;

  /// Band entry at exactly x; throws DataError if x is not on the grid.
  const BandPoint& at(double x) const;

  friend bool operator==(const BootstrapBand&, const BootstrapBand&) = default;
};

/// Percentile with linear interpolation between order statistics at
/// zero-indexed rank p/100 * (n - 1).
double percentile(std::span<const double> samples, double p);

/// Same rule on input that is already sorted ascending.
double percentile_sorted(std::span<const double> sorted, double p);

/// n log-spaced abscissae from lo to hi inclusive; endpoints are exact.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// Resample M scale groups with replacement, then each sampled group's own
/// records with replacement, and fit each pooled replicate.
BootstrapBand hierarchical_bootstrap(const RunSet& set, const BootstrapConfig& cfg,
                                     std::span<const double> grid);

/// Resample all M*T points with replacement, ignoring scale structure.
BootstrapBand naive_bootstrap(const RunSet& set, const BootstrapConfig& cfg,
                              std::span<const double> grid);

/// Dispatches on cfg.mode.
BootstrapBand bootstrap(const RunSet& set, const BootstrapConfig& cfg, std::span<const double> grid);

}  // namespace scalelaw
