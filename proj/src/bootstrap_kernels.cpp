#include "scalelaw/bootstrap_kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>

#include <omp.h>

#include "scalelaw/error.hpp"
#include "scalelaw/rng.hpp"

namespace scalelaw::kernels {

namespace {

struct Scratch {
  std::vector<double> x;
  std::vector<double> y;
};

void draw_hierarchical(const ResampleInput& in, PhiloxStream& rng, Scratch& s) {
  const std::size_t m = in.groups.size();
  for (std::size_t k = 0; k < m; ++k) {
    const auto& g = in.groups[rng.below(m)];
    for (std::size_t j = 0; j < g.size(); ++j) {
      const std::size_t idx = g[rng.below(g.size())];
      s.x.push_back(in.log_x[idx]);
      s.y.push_back(in.log_y[idx]);
    }
  }
}

void draw_naive(const ResampleInput& in, PhiloxStream& rng, Scratch& s) {
  const std::size_t b = in.log_x.size();
  for (std::size_t k = 0; k < b; ++k) {
    const std::size_t idx = rng.below(b);
    s.x.push_back(in.log_x[idx]);
    s.y.push_back(in.log_y[idx]);
  }
}

std::optional<LineCoefficients> fit_with(const ResampleInput& in, const ReplicateParams& p,
                                         std::uint64_t r, Scratch& s) {
  PhiloxStream rng(p.seed, r);
  for (std::size_t attempt = 0; attempt < p.max_redraws; ++attempt) {
    s.x.clear();
    s.y.clear();
    if (p.mode == BootstrapMode::hierarchical) {
      draw_hierarchical(in, rng, s);
    } else {
      draw_naive(in, rng, s);
    }
    if (auto line = fit_log_line(s.x, s.y)) return line;
  }
  return std::nullopt;
}

[[noreturn]] void degenerate(std::uint64_t r, std::size_t max_redraws) {
  throw DegenerateBootstrap("bootstrap replicate " + std::to_string(r) + " had fewer than 2 distinct scales in " +
                            std::to_string(max_redraws) + " consecutive draws");
}

BandPoint band_at(std::span<const LineCoefficients> fits, double x, double lo_pct, double hi_pct,
                  std::vector<double>& preds) {
  preds.clear();
  const double lx = std::log(x);
  for (const auto& f : fits) preds.push_back(std::exp(f.alpha * lx + f.beta));
  std::sort(preds.begin(), preds.end());
  return BandPoint{x, percentile_sorted(preds, lo_pct), percentile_sorted(preds, hi_pct)};
}

}  // namespace

ResampleInput prepare(const RunSet& set) {
  ResampleInput in;
  for (const auto& r : set.records()) {
    if (!(r.value > 0.0)) throw DataError("bootstrap input has a nonpositive value");
    in.log_x.push_back(std::log(static_cast<double>(r.scale.params())));
    in.log_y.push_back(std::log(r.value));
  }
  in.groups = set.scale_groups();
  return in;
}

std::optional<LineCoefficients> fit_replicate(const ResampleInput& in, const ReplicateParams& p,
                                              std::uint64_t r) {
  Scratch s;
  return fit_with(in, p, r, s);
}

std::vector<LineCoefficients> replicate_fits_serial(const ResampleInput& in, const ReplicateParams& p) {
  std::vector<LineCoefficients> out(p.replicates);
  Scratch s;
  for (std::size_t r = 0; r < p.replicates; ++r) {
    auto line = fit_with(in, p, r, s);
    if (!line) degenerate(r, p.max_redraws);
    out[r] = *line;
  }
  return out;
}

std::vector<LineCoefficients> replicate_fits_parallel(const ResampleInput& in, const ReplicateParams& p,
                                                      int threads) {
  std::vector<LineCoefficients> out(p.replicates);
  const auto n = static_cast<std::int64_t>(p.replicates);
  std::atomic<std::int64_t> first_failure{std::numeric_limits<std::int64_t>::max()};
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel num_threads(nthreads)
  {
    Scratch s;
#pragma omp for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
      auto line = fit_with(in, p, static_cast<std::uint64_t>(r), s);
      if (line) {
        out[static_cast<std::size_t>(r)] = *line;
      } else {
        auto cur = first_failure.load();
        while (r < cur && !first_failure.compare_exchange_weak(cur, r)) {
        }
      }
    }
  }
  if (first_failure.load() != std::numeric_limits<std::int64_t>::max()) {
    degenerate(static_cast<std::uint64_t>(first_failure.load()), p.max_redraws);
  }
  return out;
}

std::vector<BandPoint> prediction_band_serial(std::span<const LineCoefficients> fits,
                                              std::span<const double> grid, double lo_pct,
                                              double hi_pct) {
  std::vector<BandPoint> band(grid.size());
  std::vector<double> preds;
  preds.reserve(fits.size());
  for (std::size_t i = 0; i < grid.size(); ++i) band[i] = band_at(fits, grid[i], lo_pct, hi_pct, preds);
  return band;
}

std::vector<BandPoint> prediction_band_parallel(std::span<const LineCoefficients> fits,
                                                std::span<const double> grid, double lo_pct,
                                                double hi_pct, int threads) {
  std::vector<BandPoint> band(grid.size());
  const auto n = static_cast<std::int64_t>(grid.size());
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(nthreads)
  {
    std::vector<double> preds;
    preds.reserve(fits.size());
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      band[k] = band_at(fits, grid[k], lo_pct, hi_pct, preds);
    }
  }
  return band;
}

}  // namespace scalelaw::kernels
