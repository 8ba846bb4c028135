#include "scalelaw/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scalelaw/bootstrap_kernels.hpp"
#include "scalelaw/error.hpp"

namespace scalelaw {

namespace {

BootstrapBand run(const RunSet& set, const BootstrapConfig& cfg, std::span<const double> grid) {
  validate(cfg);
  if (set.empty()) throw DataError("bootstrap needs a nonempty run set");
  for (double x : grid) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DataError("band grid abscissae must be positive");
  }

  const auto input = kernels::prepare(set);
  const kernels::ReplicateParams params{cfg.mode, cfg.rng_seed, cfg.replicates, cfg.max_redraws};
  const bool serial = cfg.threads == 1;
  const auto fits = serial ? kernels::replicate_fits_serial(input, params)
                           : kernels::replicate_fits_parallel(input, params, cfg.threads);

  BootstrapBand band;
  band.replicates_used = fits.size();
  band.replicate_slopes.reserve(fits.size());
  band.replicate_intercepts.reserve(fits.size());
  for (const auto& f : fits) {
    band.replicate_slopes.push_back(f.alpha);
    band.replicate_intercepts.push_back(f.beta);
  }
  auto slopes = band.replicate_slopes;
  auto intercepts = band.replicate_intercepts;
  std::sort(slopes.begin(), slopes.end());
  std::sort(intercepts.begin(), intercepts.end());
  band.slope_ci = {percentile_sorted(slopes, cfg.lo_pct), percentile_sorted(slopes, cfg.hi_pct)};
  band.intercept_ci = {percentile_sorted(intercepts, cfg.lo_pct),
                       percentile_sorted(intercepts, cfg.hi_pct)};
  band.point_band = serial ? kernels::prediction_band_serial(fits, grid, cfg.lo_pct, cfg.hi_pct)
                           : kernels::prediction_band_parallel(fits, grid, cfg.lo_pct, cfg.hi_pct,
                                                               cfg.threads);
  return band;
}

}  // namespace

const char* to_token(BootstrapMode m) {
  return m == BootstrapMode::hierarchical ? "hierarchical" : "naive";
}

BootstrapMode parse_bootstrap_mode(const std::string& token) {
  if (token == "hierarchical") return BootstrapMode::hierarchical;
  if (token == "naive") return BootstrapMode::naive;
  throw UsageError("unknown bootstrap mode '" + token + "' (expected hierarchical or naive)");
}

void validate(const BootstrapConfig& cfg) {
  if (cfg.replicates == 0) throw UsageError("bootstrap replicate count must be positive");
  if (!(cfg.lo_pct >= 0.0 && cfg.hi_pct <= 100.0 && cfg.lo_pct < cfg.hi_pct)) {
    throw UsageError("bootstrap percentiles must satisfy 0 <= lo < hi <= 100");
  }
  if (cfg.max_redraws == 0) throw UsageError("max_redraws must be positive");
  if (cfg.threads < 0) throw UsageError("thread count must be nonnegative");
}

const BandPoint& BootstrapBand::at(double x) const {
  for (const auto& p : point_band) {
    if (p.x == x) return p;
  }
  throw DataError("abscissa " + std::to_string(x) + " is not on the band grid");
}

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DataError("percentile of an empty sample");
  if (!(p >= 0.0 && p <= 100.0)) throw DataError("percentile must lie in [0, 100]");
  const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const double frac = rank - static_cast<double>(lo);
  if (lo + 1 >= sorted.size() || frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double percentile(std::span<const double> samples, double p) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return percentile_sorted(sorted, p);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo)) throw DataError("log grid needs 0 < lo <= hi");
  if (n == 0) return {};
  if (n == 1 || lo == hi) return {lo};
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

BootstrapBand hierarchical_bootstrap(const RunSet& set, const BootstrapConfig& cfg,
                                     std::span<const double> grid) {
  if (cfg.mode != BootstrapMode::hierarchical) throw UsageError("config mode is not hierarchical");
  return run(set, cfg, grid);
}

BootstrapBand naive_bootstrap(const RunSet& set, const BootstrapConfig& cfg,
                              std::span<const double> grid) {
  if (cfg.mode != BootstrapMode::naive) throw UsageError("config mode is not naive");
  return run(set, cfg, grid);
}

BootstrapBand bootstrap(const RunSet& set, const BootstrapConfig& cfg, std::span<const double> grid) {
  return run(set, cfg, grid);
}

}  // namespace scalelaw
