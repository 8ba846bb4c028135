#include "scalelaw/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "scalelaw/error.hpp"

namespace scalelaw {

namespace {

bool all_equal(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double a : v) s += a;
  return s / static_cast<double>(v.size());
}

void check_points(std::span<const Point> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.x > 0.0) || !(p.y > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw DataError("point " + std::to_string(i) + " has nonpositive or non-finite coordinates");
    }
  }
}

}  // namespace

const char* to_token(ResidualSpace s) { return s == ResidualSpace::log ? "log" : "linear"; }

ResidualSpace parse_residual_space(const std::string& token) {
  if (token == "log") return ResidualSpace::log;
  if (token == "linear") return ResidualSpace::linear;
  throw UsageError("unknown residual space '" + token + "' (expected log or linear)");
}

std::optional<LineCoefficients> fit_log_line(std::span<const double> log_x,
                                             std::span<const double> log_y) {
  const std::size_t n = log_x.size();
  if (n < 2 || all_equal(log_x)) return std::nullopt;
  // Constant response: return the exact level so the residuals vanish.
  if (all_equal(log_y)) return LineCoefficients{0.0, log_y.front()};
  const double mx = mean(log_x);
  const double my = mean(log_y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = log_x[i] - mx;
    sxx += dx * dx;
    sxy += dx * (log_y[i] - my);
  }
  const double alpha = sxy / sxx;
  return LineCoefficients{alpha, my - alpha * mx};
}

GoodnessOfFit goodness_of_fit(std::span<const Point> points, double alpha, double beta,
                              ResidualSpace space) {
  std::vector<double> obs;
  std::vector<double> pred;
  obs.reserve(points.size());
  pred.reserve(points.size());
  for (const auto& p : points) {
    const double log_pred = alpha * std::log(p.x) + beta;
    if (space == ResidualSpace::log) {
      obs.push_back(std::log(p.y));
      pred.push_back(log_pred);
    } else {
      obs.push_back(p.y);
      pred.push_back(std::exp(log_pred));
    }
  }
  GoodnessOfFit g;
  double scale = 0.0;
  if (all_equal(obs)) {
    g.ss_tot = 0.0;
  } else {
    const double m = mean(obs);
    for (double o : obs) g.ss_tot += (o - m) * (o - m);
  }
  for (std::size_t i = 0; i < obs.size(); ++i) {
    g.ss_res += (obs[i] - pred[i]) * (obs[i] - pred[i]);
    scale = std::max(scale, std::abs(obs[i]));
  }
  if (g.ss_tot > 0.0) {
    g.r_squared = 1.0 - g.ss_res / g.ss_tot;
  } else {
    // Degenerate response: a fit that reproduces it up to rounding is perfect.
    const double tol = 8.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
    if (g.ss_res <= static_cast<double>(obs.size()) * tol * tol) {
      g.ss_res = 0.0;
      g.r_squared = 1.0;
    }
  }
  return g;
}

FitResult fit_line(std::span<const Point> points, ResidualSpace space) {
  check_points(points);
  std::vector<double> lx;
  std::vector<double> ly;
  lx.reserve(points.size());
  ly.reserve(points.size());
  for (const auto& p : points) {
    lx.push_back(std::log(p.x));
    ly.push_back(std::log(p.y));
  }
  const auto line = fit_log_line(lx, ly);
  if (!line) throw DataError("fit needs at least 2 distinct x values");

  FitResult fit;
  fit.alpha = line->alpha;
  fit.beta = line->beta;
  fit.n_points = points.size();
  fit.residual_space = space;
  const auto g = goodness_of_fit(points, fit.alpha, fit.beta, space);
  if (!g.r_squared) throw DataError("R^2 undefined: response has zero variance but nonzero residuals");
  fit.ss_res = g.ss_res;
  fit.ss_tot = g.ss_tot;
  fit.r_squared = *g.r_squared;
  return fit;
}

std::optional<double> r_squared(std::span<const Point> points, const FitResult& fit,
                                ResidualSpace space) {
  check_points(points);
  return goodness_of_fit(points, fit.alpha, fit.beta, space).r_squared;
}

double predict_at(const FitResult& fit, double x) {
  return predict_at(LineCoefficients{fit.alpha, fit.beta}, x);
}

double predict_at(const LineCoefficients& line, double x) {
  if (!(x > 0.0)) throw DataError("prediction abscissa must be positive");
  return std::exp(line.alpha * std::log(x) + line.beta);
}

std::vector<Point> points_of(const RunSet& set) {
  std::vector<Point> pts;
  pts.reserve(set.size());
  for (const auto& r : set.records()) pts.push_back({static_cast<double>(r.scale.params()), r.value});
  return pts;
}

FitResult fit_runset(const RunSet& set, ResidualSpace space) {
  if (set.num_scales() < 2) {
    throw DataError("run set (" + set.key().task + ", " + set.key().family + ", " + set.key().metric +
                    ") has fewer than 2 distinct scales");
  }
  return fit_line(points_of(set), space);
}

FitResult fit_filtered(const RunSet& set, std::int64_t min_layers, ResidualSpace space) {
  if (min_layers < 1) throw DataError("min depth must be >= 1");
  const auto kept = filter_layers(set, min_layers, std::numeric_limits<std::int64_t>::max());
  if (kept.num_scales() < 2) {
    throw DataError("depth filter >= " + std::to_string(min_layers) +
                    " leaves fewer than 2 distinct scales");
  }
  auto fit = fit_line(points_of(kept), space);
  fit.min_depth = min_layers;
  return fit;
}

}  // namespace scalelaw
