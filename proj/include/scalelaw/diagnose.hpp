#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "scalelaw/bootstrap.hpp"
#include "scalelaw/records.hpp"

namespace scalelaw {

struct CurvePoint {
  std::int64_t step = 0;
  double eval_loss = 0.0;
};

/// Evaluation-loss curve with strictly increasing steps and positive losses.
class LossCurve {
 public:
  explicit LossCurve(std::vector<CurvePoint> points);
  /// Steps 0, 1, 2, ... for the given losses.
  static LossCurve from_losses(const std::vector<double>& losses);

  const std::vector<CurvePoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<CurvePoint> points_;
};

/// Two-column CSV "step,eval_loss" with a header row.
LossCurve read_loss_curve(std::istream& in);
LossCurve read_loss_curve(const std::filesystem::path& path);

/// Patience is counted in evaluations (curve points), not optimizer steps.
struct EarlyStopPolicy {
  std::int64_t patience = 1;
  double min_decrease = 0.0;
};

struct EarlyStopResult {
  std::size_t stop_index = 0;
  std::size_t best_index = 0;
  bool stopped = false;
};

/// An evaluation improves iff loss < best - min_decrease. Stops at the first
/// point where the count of consecutive non-improving evaluations reaches
/// patience.
EarlyStopResult early_stop(const LossCurve& curve, const EarlyStopPolicy& policy);

struct PolicyOutcome {
  EarlyStopPolicy policy;
  EarlyStopResult result;
  double loss_at_best = 0.0;
  std::int64_t step_at_stop = 0;
};

/// One early_stop per policy, sorted by patience (then min_decrease).
std::vector<PolicyOutcome> compare_policies(const LossCurve& curve,
                                            const std::vector<EarlyStopPolicy>& policies);

enum class ConvergenceFlag { consistent, suspect_undertrained, suspect_overfit_fit };

const char* to_token(ConvergenceFlag f);

struct ConvergenceVerdict {
  ScaleSpec scale;
  double observed = 0.0;
  double predicted = 0.0;
  Interval band;
  ConvergenceFlag flag = ConvergenceFlag::consistent;
};

/// Relative slack on the band edges so that data lying exactly on the law is
/// not flagged by rounding in the refit.
inline constexpr double kBandEdgeTolerance = 1e-9;

ConvergenceFlag classify_observation(double observed, const Interval& band);

/// Fit and bootstrap the law on the remaining scales of a minimized metric and
/// place the observed loss at the held-out scale against the band.
ConvergenceVerdict flag_undertrained(const RunSet& set, const ScaleSpec& held_out, double observed,
                                     const BootstrapConfig& cfg);

/// The run set without records at the given depth.
RunSet exclude_layers(const RunSet& set, std::int64_t layers);

}  // namespace scalelaw
