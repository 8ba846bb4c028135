#include "scalelaw/report.hpp"

#include <limits>
#include <sstream>

#include "scalelaw/error.hpp"

namespace scalelaw {

using nlohmann::json;

namespace {

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

void flatten(const json& j, const std::string& prefix, std::ostringstream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << "  " << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

}  // namespace

std::string serialize(const Report& report) {
  json j = report;
  return j.dump(2) + "\n";
}

Report parse_report(const std::string& text) {
  try {
    return json::parse(text).get<Report>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

void to_json(json& j, const Report& r) {
  j = json{{"command", r.command},
           {"inputs", r.inputs},
           {"results", r.results},
           {"schema_version", r.schema_version}};
}

void from_json(const json& j, Report& r) {
  r.command = j.at("command").get<std::string>();
  r.inputs = j.at("inputs");
  r.results = j.at("results");
  r.schema_version = j.at("schema_version").get<std::string>();
}

void to_json(json& j, const ScaleSpec& s) {
  j = json{{"layers", opt_json(s.layers())},
           {"hidden", opt_json(s.hidden())},
           {"params", s.params()},
           {"params_overridden", s.params_overridden()}};
  if (auto ar = s.aspect_ratio()) {
    j["aspect_ratio"] = ar->value();
  } else {
    j["aspect_ratio"] = nullptr;
  }
}

void from_json(const json& j, ScaleSpec& s) {
  const auto layers = opt_from<std::int64_t>(j, "layers");
  const auto hidden = opt_from<std::int64_t>(j, "hidden");
  const auto params = j.at("params").get<std::int64_t>();
  const bool overridden = j.value("params_overridden", false);
  if (layers && hidden) {
    s = overridden ? ScaleSpec::with_params(*layers, *hidden, params) : ScaleSpec::from_shape(*layers, *hidden);
  } else {
    s = ScaleSpec::from_params(params);
  }
}

void to_json(json& j, const FitResult& f) {
  j = json{{"alpha", f.alpha},
           {"beta", f.beta},
           {"r_squared", f.r_squared},
           {"ss_res", f.ss_res},
           {"ss_tot", f.ss_tot},
           {"n_points", f.n_points},
           {"residual_space", to_token(f.residual_space)},
           {"min_depth", opt_json(f.min_depth)}};
}

void from_json(const json& j, FitResult& f) {
  f.alpha = j.at("alpha").get<double>();
  f.beta = j.at("beta").get<double>();
  f.r_squared = j.at("r_squared").get<double>();
  f.ss_res = j.at("ss_res").get<double>();
  f.ss_tot = j.at("ss_tot").get<double>();
  f.n_points = j.at("n_points").get<std::size_t>();
  f.residual_space = parse_residual_space(j.at("residual_space").get<std::string>());
  f.min_depth = opt_from<std::int64_t>(j, "min_depth");
}

void to_json(json& j, const Interval& i) { j = json{{"lo", i.lo}, {"hi", i.hi}}; }

void from_json(const json& j, Interval& i) {
  i.lo = j.at("lo").get<double>();
  i.hi = j.at("hi").get<double>();
}

void to_json(json& j, const BandPoint& p) { j = json{{"x", p.x}, {"y_lo", p.y_lo}, {"y_hi", p.y_hi}}; }

void from_json(const json& j, BandPoint& p) {
  p.x = j.at("x").get<double>();
  p.y_lo = j.at("y_lo").get<double>();
  p.y_hi = j.at("y_hi").get<double>();
}

void to_json(json& j, const BootstrapBand& b) {
  j = json{{"slope_ci", b.slope_ci},
           {"intercept_ci", b.intercept_ci},
           {"point_band", b.point_band},
           {"replicates_used", b.replicates_used},
           {"replicate_slopes", b.replicate_slopes},
           {"replicate_intercepts", b.replicate_intercepts}};
}

void from_json(const json& j, BootstrapBand& b) {
  b.slope_ci = j.at("slope_ci").get<Interval>();
  b.intercept_ci = j.at("intercept_ci").get<Interval>();
  b.point_band = j.at("point_band").get<std::vector<BandPoint>>();
  b.replicates_used = j.at("replicates_used").get<std::size_t>();
  b.replicate_slopes = j.at("replicate_slopes").get<std::vector<double>>();
  b.replicate_intercepts = j.at("replicate_intercepts").get<std::vector<double>>();
}

void to_json(json& j, const PredictionTarget& t) { j = json{{"x", t.x}, {"actual", opt_json(t.actual)}}; }

void from_json(const json& j, PredictionTarget& t) {
  t.x = j.at("x").get<double>();
  t.actual = opt_from<double>(j, "actual");
}

void to_json(json& j, const PredictionReport& p) {
  json re = json::array();
  for (const auto& r : p.re) re.push_back(opt_json(r));
  j = json{{"fit", p.fit},
           {"k", p.k()},
           {"targets", p.targets},
           {"predictions", p.predictions},
           {"mre", opt_json(p.mre)},
           {"re", re},
           {"band_at_targets", p.band_at_targets}};
}

void from_json(const json& j, PredictionReport& p) {
  p.fit = j.at("fit").get<FitResult>();
  p.targets = j.at("targets").get<std::vector<PredictionTarget>>();
  p.predictions = j.at("predictions").get<std::vector<double>>();
  p.mre = opt_from<double>(j, "mre");
  p.re.clear();
  for (const auto& r : j.at("re")) p.re.push_back(r.is_null() ? std::nullopt : std::optional<double>(r.get<double>()));
  p.band_at_targets = j.at("band_at_targets").get<std::vector<BandPoint>>();
}

void to_json(json& j, const SelectionReport& s) {
  j = json{{"family_a", s.family_a},
           {"family_b", s.family_b},
           {"fit_a", s.fit_a},
           {"fit_b", s.fit_b},
           {"r2_threshold", s.r2_threshold},
           {"gate_passed_a", s.gate_passed_a},
           {"gate_passed_b", s.gate_passed_b},
           {"target_x", s.target_x},
           {"prediction_a", s.prediction_a},
           {"prediction_b", s.prediction_b},
           {"band_a", s.band_a},
           {"band_b", s.band_b},
           {"predicted_gap", s.predicted_gap},
           {"actual_gap", opt_json(s.actual_gap)},
           {"sign_agreement", opt_json(s.sign_agreement)},
           {"reliable", s.reliable()}};
}

void from_json(const json& j, SelectionReport& s) {
  s.family_a = j.at("family_a").get<std::string>();
  s.family_b = j.at("family_b").get<std::string>();
  s.fit_a = j.at("fit_a").get<FitResult>();
  s.fit_b = j.at("fit_b").get<FitResult>();
  s.r2_threshold = j.at("r2_threshold").get<double>();
  s.gate_passed_a = j.at("gate_passed_a").get<bool>();
  s.gate_passed_b = j.at("gate_passed_b").get<bool>();
  s.target_x = j.at("target_x").get<double>();
  s.prediction_a = j.at("prediction_a").get<double>();
  s.prediction_b = j.at("prediction_b").get<double>();
  s.band_a = j.at("band_a").get<BandPoint>();
  s.band_b = j.at("band_b").get<BandPoint>();
  s.predicted_gap = j.at("predicted_gap").get<double>();
  s.actual_gap = opt_from<double>(j, "actual_gap");
  s.sign_agreement = opt_from<bool>(j, "sign_agreement");
}

void to_json(json& j, const EarlyStopPolicy& p) {
  j = json{{"patience", p.patience}, {"min_decrease", p.min_decrease}};
}

void to_json(json& j, const PolicyOutcome& o) {
  j = json{{"policy", o.policy},
           {"stop_index", o.result.stop_index},
           {"best_index", o.result.best_index},
           {"stopped", o.result.stopped},
           {"loss_at_best", o.loss_at_best},
           {"step_at_stop", o.step_at_stop}};
}

void to_json(json& j, const ConvergenceVerdict& v) {
  j = json{{"scale", v.scale},
           {"observed", v.observed},
           {"predicted", v.predicted},
           {"band", v.band},
           {"flag", to_token(v.flag)}};
}

json flops_json(FlopCount c) {
  if (c <= std::numeric_limits<std::uint64_t>::max()) return json(static_cast<std::uint64_t>(c));
  return json(to_string(c));
}

void to_json(json& j, const ComputeEstimate& c) {
  j = json{{"params", c.params}, {"tokens", c.tokens}, {"flops", flops_json(c.flops)}};
}

std::string render_table(const json& j) {
  std::ostringstream out;
  flatten(j, "", out);
  return out.str();
}

}  // namespace scalelaw
