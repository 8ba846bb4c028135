#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scalelaw/records.hpp"

namespace scalelaw {

/// Exact FLOP counts overflow 64 bits for realistic (N, D), so they are kept
/// in 128 bits.
__extension__ typedef unsigned __int128 FlopCount;

std::string to_string(FlopCount v);

/// Non-embedding parameter count 12 * L * H^2. Throws DataError on L < 1,
/// H < 1 or int64 overflow.
std::int64_t param_count(std::int64_t layers, std::int64_t hidden);

/// Training compute 6 * N * D (forward and backward passes).
FlopCount flops(std::int64_t params, std::int64_t tokens);

struct ComputeEstimate {
  std::int64_t params = 0;
  std::int64_t tokens = 0;
  FlopCount flops = 0;
};

ComputeEstimate estimate_compute(std::int64_t params, std::int64_t tokens);

/// A model configuration with the number of training tokens it saw, if known.
struct SizedModel {
  ScaleSpec scale;
  std::optional<std::int64_t> tokens;
};

enum class TokenAssumption { equal_tokens, supplied_tokens };

/// Cost of training `large` relative to training every model in `small`.
/// equal_tokens compares parameter totals; supplied_tokens compares 6ND totals.
/// Evaluation FLOPs spent by early stopping are not counted.
double savings_ratio(const std::vector<SizedModel>& small, const SizedModel& large,
                     TokenAssumption assumption);

/// Configurations L = lo..hi at fixed aspect ratio H = ar * L.
std::vector<ScaleSpec> aspect_ratio_family(std::int64_t ar, std::int64_t lo, std::int64_t hi);

}  // namespace scalelaw
