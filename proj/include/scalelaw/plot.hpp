#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scalelaw/bootstrap.hpp"
#include "scalelaw/powerlaw.hpp"

namespace scalelaw {

struct PlotSeries {
  std::string label;
  std::vector<Point> points;
  /// Pretraining seed per point; markers are colored per seed group. May be
  /// empty, in which case all points share one group.
  std::vector<std::int64_t> pretrain_seeds;
  std::optional<FitResult> fit;
  /// Confidence sleeve; drawn only when nonempty.
  std::vector<BandPoint> band;
  std::vector<Point> held_out;
};

struct PlotSpec {
  std::vector<PlotSeries> series;
  std::string title;
  std::string x_label = "parameters";
  std::string y_label = "value";
  int width = 640;
  int height = 440;
};

/// Standalone log-log SVG document. Throws DataError when there is nothing to
/// draw.
std::string render_plot(const PlotSpec& spec);

}  // namespace scalelaw
