#include "scalelaw/diagnose.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scalelaw/error.hpp"
#include "scalelaw/powerlaw.hpp"

namespace scalelaw {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_cell(const std::string& cell, std::size_t lineno, const char* field) {
  T v{};
  auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || end != cell.data() + cell.size()) {
    throw DataError("curve row " + std::to_string(lineno) + ", field '" + field + "': malformed number '" +
                    cell + "'");
  }
  return v;
}

}  // namespace

LossCurve::LossCurve(std::vector<CurvePoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw DataError("loss curve needs at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].eval_loss > 0.0) || !std::isfinite(points_[i].eval_loss)) {
      throw DataError("loss curve point " + std::to_string(i) + " has a nonpositive loss");
    }
    if (points_[i].step < 0) throw DataError("loss curve steps must be nonnegative");
    if (i > 0 && points_[i].step <= points_[i - 1].step) {
      throw DataError("loss curve steps must be strictly increasing (point " + std::to_string(i) + ")");
    }
  }
}

LossCurve LossCurve::from_losses(const std::vector<double>& losses) {
  std::vector<CurvePoint> pts;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    pts.push_back({static_cast<std::int64_t>(i), losses[i]});
  }
  return LossCurve(std::move(pts));
}

LossCurve read_loss_curve(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::vector<CurvePoint> pts;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw DataError("curve row " + std::to_string(lineno) + ": expected two columns");
    }
    const auto a = trim(line.substr(0, comma));
    const auto b = trim(line.substr(comma + 1));
    if (!header_seen) {
      if (a != "step" || b != "eval_loss") {
        throw DataError("curve CSV header must be 'step,eval_loss'");
      }
      header_seen = true;
      continue;
    }
    pts.push_back({parse_cell<std::int64_t>(a, lineno, "step"), parse_cell<double>(b, lineno, "eval_loss")});
  }
  if (!header_seen) throw DataError("curve CSV is empty (header required)");
  return LossCurve(std::move(pts));
}

LossCurve read_loss_curve(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_loss_curve(in);
}

EarlyStopResult early_stop(const LossCurve& curve, const EarlyStopPolicy& policy) {
  if (policy.patience < 1) throw UsageError("patience must be >= 1");
  if (!(policy.min_decrease >= 0.0)) throw UsageError("min_decrease must be nonnegative");
  const auto& pts = curve.points();
  EarlyStopResult res;
  double best = pts.front().eval_loss;
  std::int64_t stale = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].eval_loss < best - policy.min_decrease) {
      best = pts[i].eval_loss;
      res.best_index = i;
      stale = 0;
    } else if (++stale == policy.patience) {
      res.stop_index = i;
      res.stopped = true;
      return res;
    }
  }
  res.stop_index = pts.size() - 1;
  return res;
}

std::vector<PolicyOutcome> compare_policies(const LossCurve& curve,
                                            const std::vector<EarlyStopPolicy>& policies) {
  std::vector<PolicyOutcome> table;
  for (const auto& p : policies) {
    const auto r = early_stop(curve, p);
    table.push_back({p, r, curve.points()[r.best_index].eval_loss, curve.points()[r.stop_index].step});
  }
  std::stable_sort(table.begin(), table.end(), [](const PolicyOutcome& a, const PolicyOutcome& b) {
    if (a.policy.patience != b.policy.patience) return a.policy.patience < b.policy.patience;
    return a.policy.min_decrease < b.policy.min_decrease;
  });
  return table;
}

const char* to_token(ConvergenceFlag f) {
  switch (f) {
    case ConvergenceFlag::consistent:
      return "consistent";
    case ConvergenceFlag::suspect_undertrained:
      return "suspect_undertrained";
    case ConvergenceFlag::suspect_overfit_fit:
      return "suspect_overfit_fit";
  }
  return "consistent";
}

ConvergenceFlag classify_observation(double observed, const Interval& band) {
  if (observed > band.hi * (1.0 + kBandEdgeTolerance)) return ConvergenceFlag::suspect_undertrained;
  if (observed < band.lo * (1.0 - kBandEdgeTolerance)) return ConvergenceFlag::suspect_overfit_fit;
  return ConvergenceFlag::consistent;
}

ConvergenceVerdict flag_undertrained(const RunSet& set, const ScaleSpec& held_out, double observed,
                                     const BootstrapConfig& cfg) {
  if (set.empty()) throw DataError("convergence check needs a nonempty run set");
  if (set.direction() != Direction::minimize) {
    throw DataError("under-training check requires a minimized metric (got direction max)");
  }
  if (!(observed > 0.0) || !std::isfinite(observed)) throw DataError("observed loss must be positive");
  for (const auto& r : set.records()) {
    if (r.scale.params() == held_out.params()) {
      throw DataError("run set still contains the held-out scale (" + std::to_string(held_out.params()) +
                      " params)");
    }
  }
  const auto fit = fit_runset(set);
  const double x = static_cast<double>(held_out.params());
  const std::vector<double> grid{x};
  const auto band = bootstrap(set, cfg, grid);
  const auto& at = band.at(x);

  ConvergenceVerdict v;
  v.scale = held_out;
  v.observed = observed;
  v.predicted = predict_at(fit, x);
  v.band = Interval{at.y_lo, at.y_hi};
  v.flag = classify_observation(observed, v.band);
  return v;
}

RunSet exclude_layers(const RunSet& set, std::int64_t layers) {
  std::vector<RunRecord> kept;
  for (const auto& r : set.records()) {
    if (!r.scale.layers()) throw DataError("record lacks layer information");
    if (*r.scale.layers() != layers) kept.push_back(r);
  }
  return RunSet(std::move(kept));
}

}  // namespace scalelaw
