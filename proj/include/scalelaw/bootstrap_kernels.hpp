#pragma once

// Replicate-level kernels behind the bootstrap. The serial versions are the
// reference implementation; the OpenMP versions must match them bit for bit.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scalelaw/bootstrap.hpp"
#include "scalelaw/powerlaw.hpp"

namespace scalelaw::kernels {

/// Log-space data laid out for resampling. groups[g] lists the indices of the
/// points that belong to scale g.
struct ResampleInput {
  std::vector<double> log_x;
  std::vector<double> log_y;
  std::vector<std::vector<std::size_t>> groups;
};

ResampleInput prepare(const RunSet& set);

struct ReplicateParams {
  BootstrapMode mode = BootstrapMode::hierarchical;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::size_t max_redraws = 100;
};

/// Fits replicate r from substream (seed, r), redrawing degenerate samples.
/// Returns nullopt when max_redraws consecutive draws were degenerate.
std::optional<LineCoefficients> fit_replicate(const ResampleInput& in, const ReplicateParams& p,
                                              std::uint64_t r);

/// Throws DegenerateBootstrap naming the lowest failing replicate.
std::vector<LineCoefficients> replicate_fits_serial(const ResampleInput& in, const ReplicateParams& p);
std::vector<LineCoefficients> replicate_fits_parallel(const ResampleInput& in, const ReplicateParams& p,
                                                      int threads);

/// Percentile band of exp(alpha ln x + beta) across replicates at each x.
std::vector<BandPoint> prediction_band_serial(std::span<const LineCoefficients> fits,
                                              std::span<const double> grid, double lo_pct,
                                              double hi_pct);
std::vector<BandPoint> prediction_band_parallel(std::span<const LineCoefficients> fits,
                                                std::span<const double> grid, double lo_pct,
                                                double hi_pct, int threads);

}  // namespace scalelaw::kernels
