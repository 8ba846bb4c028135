#include "scalelaw/predict.hpp"

#include <charconv>
#include <cmath>

#include "scalelaw/error.hpp"

namespace scalelaw {

namespace {

void check_actual(double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw DataError("actual value must be positive and finite");
}

std::int64_t parse_int(std::string_view s, const std::string& whole) {
  std::int64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw UsageError("malformed layer range '" + whole + "' (expected A-B)");
  }
  return v;
}

}  // namespace

double mre(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) {
    throw DataError("MRE length mismatch: " + std::to_string(actual.size()) + " actual vs " +
                    std::to_string(predicted.size()) + " predicted");
  }
  if (actual.empty()) throw DataError("MRE needs at least one target");
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) throw DataError("MRE undefined for a zero actual value");
    sum += std::abs((actual[i] - predicted[i]) / actual[i]);
  }
  return sum / static_cast<double>(actual.size());
}

double re(double actual, double predicted) {
  if (actual == 0.0) throw DataError("RE undefined for a zero actual value");
  return (actual - predicted) / actual;
}

LayerRange parse_layer_range(const std::string& text) {
  const auto dash = text.find('-');
  LayerRange r;
  if (dash == std::string::npos) {
    r.lo = r.hi = parse_int(text, text);
  } else {
    r.lo = parse_int(std::string_view(text).substr(0, dash), text);
    r.hi = parse_int(std::string_view(text).substr(dash + 1), text);
  }
  if (r.lo < 1 || r.hi < r.lo) throw UsageError("invalid layer range '" + text + "'");
  return r;
}

PredictionReport holdout_eval(const RunSet& set, const LayerRange& train, const LayerRange& test) {
  if (train.overlaps(test)) {
    throw DataError("train layers " + std::to_string(train.lo) + "-" + std::to_string(train.hi) +
                    " overlap test layers " + std::to_string(test.lo) + "-" + std::to_string(test.hi));
  }
  const auto train_set = filter_layers(set, train.lo, train.hi);
  const auto test_set = filter_layers(set, test.lo, test.hi);
  if (test_set.empty()) throw DataError("holdout test range selects no records");

  PredictionReport rep;
  rep.fit = fit_runset(train_set);
  std::vector<double> actual;
  for (const auto& g : test_set.scale_groups()) {
    double sum = 0.0;
    for (auto i : g) sum += test_set.records()[i].value;
    const double mean = sum / static_cast<double>(g.size());
    const double x = static_cast<double>(test_set.records()[g.front()].scale.params());
    const double pred = predict_at(rep.fit, x);
    rep.targets.push_back({x, mean});
    rep.predictions.push_back(pred);
    rep.re.push_back(re(mean, pred));
    actual.push_back(mean);
  }
  rep.mre = mre(actual, rep.predictions);
  return rep;
}

PredictionReport extrapolate(const RunSet& set, const ScaleSpec& target, const BootstrapConfig& cfg,
                             std::optional<double> actual) {
  if (target.params() < 1) throw DataError("target params must be positive");
  if (actual) check_actual(*actual);
  PredictionReport rep;
  rep.fit = fit_runset(set);
  const double x = static_cast<double>(target.params());
  const double pred = predict_at(rep.fit, x);
  const std::vector<double> grid{x};
  const auto band = bootstrap(set, cfg, grid);
  rep.targets.push_back({x, actual});
  rep.predictions.push_back(pred);
  rep.band_at_targets.push_back(band.at(x));
  if (actual) {
    rep.re.push_back(re(*actual, pred));
    rep.mre = std::abs(rep.re.back().value());
  } else {
    rep.re.push_back(std::nullopt);
  }
  return rep;
}

bool gate_passes(const FitResult& fit, double r2_threshold) { return fit.r_squared >= r2_threshold; }

bool same_sign(double predicted_gap, double actual_gap) {
  return (predicted_gap >= 0.0) == (actual_gap >= 0.0);
}

SelectionReport select_model(const RunSet& a, const RunSet& b, const ScaleSpec& target,
                             double r2_threshold, const BootstrapConfig& cfg,
                             std::optional<double> actual_a, std::optional<double> actual_b) {
  if (!(r2_threshold > 0.0 && r2_threshold <= 1.0)) {
    throw UsageError("R^2 threshold must lie in (0, 1]");
  }
  if (a.empty() || b.empty()) throw DataError("model selection needs two nonempty run sets");
  const auto& ka = a.key();
  const auto& kb = b.key();
  if (ka.task != kb.task) {
    throw DataError("task mismatch: family '" + ka.family + "' uses task '" + ka.task + "', family '" +
                    kb.family + "' uses task '" + kb.task + "'");
  }
  if (ka.metric != kb.metric) {
    throw DataError("metric mismatch: family '" + ka.family + "' uses metric '" + ka.metric +
                    "', family '" + kb.family + "' uses metric '" + kb.metric + "'");
  }
  if (a.direction() != b.direction()) {
    throw DataError("direction mismatch between families '" + ka.family + "' and '" + kb.family + "'");
  }
  if (actual_a.has_value() != actual_b.has_value()) {
    throw UsageError("actual values must be given for both families or neither");
  }

  const auto ra = extrapolate(a, target, cfg, actual_a);
  const auto rb = extrapolate(b, target, cfg, actual_b);

  SelectionReport s;
  s.family_a = ka.family;
  s.family_b = kb.family;
  s.fit_a = ra.fit;
  s.fit_b = rb.fit;
  s.r2_threshold = r2_threshold;
  s.gate_passed_a = gate_passes(s.fit_a, r2_threshold);
  s.gate_passed_b = gate_passes(s.fit_b, r2_threshold);
  s.target_x = ra.targets.front().x;
  s.prediction_a = ra.predictions.front();
  s.prediction_b = rb.predictions.front();
  s.band_a = ra.band_at_targets.front();
  s.band_b = rb.band_at_targets.front();
  s.predicted_gap = s.prediction_b - s.prediction_a;
  if (actual_a && actual_b) {
    s.actual_gap = *actual_b - *actual_a;
    s.sign_agreement = same_sign(s.predicted_gap, *s.actual_gap);
  }
  return s;
}

}  // namespace scalelaw
