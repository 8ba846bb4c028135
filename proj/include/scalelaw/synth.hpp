#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scalelaw/records.hpp"

namespace scalelaw {

enum class NoiseKind { normal, uniform };

const char* to_token(NoiseKind k);
NoiseKind parse_noise_kind(const std::string& token);

/// Ground-truth power law with two noise levels in log space: one offset per
/// scale (pretraining seed) and one per run (finetuning seed).
struct SynthSpec {
  double true_alpha = 0.0;
  double true_log_c = 0.0;
  std::vector<ScaleSpec> scales;
  std::int64_t seeds_per_scale = 1;
  double sigma_pre = 0.0;
  double sigma_fin = 0.0;
  std::uint64_t rng_seed = 0;
  Direction direction = Direction::maximize;
  NoiseKind noise = NoiseKind::normal;
  std::string task = "synthetic";
  std::string family = "synth";
  std::string metric = "score";
};

struct SynthResult {
  RunSet runs;
  double true_alpha = 0.0;
  double true_log_c = 0.0;
  /// Per-scale log offsets u, aligned with spec.scales.
  std::vector<double> scale_offsets;
};

/// value = exp(log_c + alpha ln N + u_scale + eps_run). Scale j draws from
/// substream (rng_seed, j): first u_j, then eps for runs 0..T-1.
SynthResult generate(const SynthSpec& spec);

/// True law value at x without noise.
double true_value(const SynthSpec& spec, double x);

}  // namespace scalelaw
