#include "scalelaw/scalecalc.hpp"

#include <algorithm>
#include <limits>

#include "scalelaw/error.hpp"

namespace scalelaw {

std::string to_string(FlopCount v) {
  if (v == 0) return "0";
  std::string digits;
  while (v > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

std::int64_t param_count(std::int64_t layers, std::int64_t hidden) {
  if (layers < 1) throw DataError("layers must be >= 1, got " + std::to_string(layers));
  if (hidden < 1) throw DataError("hidden must be >= 1, got " + std::to_string(hidden));
  __extension__ const __int128 n = static_cast<__int128>(12) * layers * hidden * hidden;
  if (n > std::numeric_limits<std::int64_t>::max()) {
    throw DataError("parameter count overflows 64 bits");
  }
  return static_cast<std::int64_t>(n);
}

FlopCount flops(std::int64_t params, std::int64_t tokens) {
  if (params < 0 || tokens < 0) throw DataError("params and tokens must be nonnegative");
  return FlopCount{6} * static_cast<FlopCount>(params) * static_cast<FlopCount>(tokens);
}

ComputeEstimate estimate_compute(std::int64_t params, std::int64_t tokens) {
  return ComputeEstimate{params, tokens, flops(params, tokens)};
}

double savings_ratio(const std::vector<SizedModel>& small, const SizedModel& large,
                     TokenAssumption assumption) {
  if (small.empty()) throw DataError("savings_ratio needs at least one small model");
  if (assumption == TokenAssumption::equal_tokens) {
    long double total = 0;
    for (const auto& m : small) total += static_cast<long double>(m.scale.params());
    return static_cast<double>(static_cast<long double>(large.scale.params()) / total);
  }
  const auto cost = [](const SizedModel& m) {
    if (!m.tokens) {
      throw DataError("token count missing for model with " + std::to_string(m.scale.params()) +
                      " params (required under supplied_tokens)");
    }
    return flops(m.scale.params(), *m.tokens);
  };
  FlopCount total = 0;
  for (const auto& m : small) total += cost(m);
  const FlopCount big = cost(large);
  if (total == 0) throw DataError("small models have zero total compute");
  return static_cast<double>(static_cast<long double>(big) / static_cast<long double>(total));
}

std::vector<ScaleSpec> aspect_ratio_family(std::int64_t ar, std::int64_t lo, std::int64_t hi) {
  if (ar < 1 || lo < 1 || hi < lo) throw DataError("invalid aspect-ratio family bounds");
  std::vector<ScaleSpec> out;
  for (auto l = lo; l <= hi; ++l) out.push_back(ScaleSpec::from_shape(l, ar * l));
  return out;
}

}  // namespace scalelaw
