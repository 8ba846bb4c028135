#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "scalelaw/bootstrap.hpp"
#include "scalelaw/diagnose.hpp"
#include "scalelaw/powerlaw.hpp"
#include "scalelaw/predict.hpp"
#include "scalelaw/records.hpp"
#include "scalelaw/scalecalc.hpp"

namespace scalelaw {

inline constexpr const char* kSchemaVersion = "1";

/// Envelope written by every CLI subcommand.
struct Report {
  std::string command;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::string schema_version = kSchemaVersion;

  friend bool operator==(const Report&, const Report&) = default;
};

/// Key-sorted, two-space indented JSON followed by a newline.
std::string serialize(const Report& report);
Report parse_report(const std::string& text);

void to_json(nlohmann::json& j, const Report& r);
void from_json(const nlohmann::json& j, Report& r);

void to_json(nlohmann::json& j, const ScaleSpec& s);
void from_json(const nlohmann::json& j, ScaleSpec& s);
void to_json(nlohmann::json& j, const FitResult& f);
void from_json(const nlohmann::json& j, FitResult& f);
void to_json(nlohmann::json& j, const Interval& i);
void from_json(const nlohmann::json& j, Interval& i);
void to_json(nlohmann::json& j, const BandPoint& p);
void from_json(const nlohmann::json& j, BandPoint& p);
void to_json(nlohmann::json& j, const BootstrapBand& b);
void from_json(const nlohmann::json& j, BootstrapBand& b);
void to_json(nlohmann::json& j, const PredictionTarget& t);
void from_json(const nlohmann::json& j, PredictionTarget& t);
void to_json(nlohmann::json& j, const PredictionReport& p);
void from_json(const nlohmann::json& j, PredictionReport& p);
void to_json(nlohmann::json& j, const SelectionReport& s);
void from_json(const nlohmann::json& j, SelectionReport& s);
void to_json(nlohmann::json& j, const EarlyStopPolicy& p);
void to_json(nlohmann::json& j, const PolicyOutcome& o);
void to_json(nlohmann::json& j, const ConvergenceVerdict& v);
void to_json(nlohmann::json& j, const ComputeEstimate& c);

/// FLOP counts that fit in 64 bits are emitted as JSON integers, larger ones
/// as decimal strings.
nlohmann::json flops_json(FlopCount c);

/// "key  value" lines for every scalar leaf, keys in dotted path form.
std::string render_table(const nlohmann::json& j);

}  // namespace scalelaw
