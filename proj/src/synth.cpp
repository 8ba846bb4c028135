#include "scalelaw/synth.hpp"

#include <cmath>

#include "scalelaw/error.hpp"
#include "scalelaw/rng.hpp"

namespace scalelaw {

namespace {

double draw(PhiloxStream& rng, NoiseKind kind, double sigma) {
  if (sigma == 0.0) return 0.0;
  if (kind == NoiseKind::normal) return sigma * rng.normal();
  // Same variance as the normal option.
  return sigma * std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
}

}  // namespace

const char* to_token(NoiseKind k) { return k == NoiseKind::normal ? "normal" : "uniform"; }

NoiseKind parse_noise_kind(const std::string& token) {
  if (token == "normal") return NoiseKind::normal;
  if (token == "uniform") return NoiseKind::uniform;
  throw UsageError("unknown noise kind '" + token + "' (expected normal or uniform)");
}

double true_value(const SynthSpec& spec, double x) {
  return std::exp(spec.true_log_c + spec.true_alpha * std::log(x));
}

SynthResult generate(const SynthSpec& spec) {
  if (spec.scales.empty()) throw DataError("synthetic spec needs at least one scale");
  if (spec.seeds_per_scale < 1) throw DataError("seeds per scale must be >= 1");
  if (!(spec.sigma_pre >= 0.0) || !(spec.sigma_fin >= 0.0)) {
    throw DataError("noise levels must be nonnegative");
  }
  SynthResult out;
  out.true_alpha = spec.true_alpha;
  out.true_log_c = spec.true_log_c;
  std::vector<RunRecord> records;
  records.reserve(spec.scales.size() * static_cast<std::size_t>(spec.seeds_per_scale));
  for (std::size_t j = 0; j < spec.scales.size(); ++j) {
    const auto& scale = spec.scales[j];
    PhiloxStream rng(spec.rng_seed, j);
    const double u = draw(rng, spec.noise, spec.sigma_pre);
    out.scale_offsets.push_back(u);
    const double level = spec.true_log_c + spec.true_alpha * std::log(static_cast<double>(scale.params())) + u;
    for (std::int64_t t = 0; t < spec.seeds_per_scale; ++t) {
      RunRecord r;
      r.scale = scale;
      r.task = spec.task;
      r.family = spec.family;
      r.metric = spec.metric;
      r.pretrain_seed = 0;
      r.finetune_seed = t;
      r.value = std::exp(level + draw(rng, spec.noise, spec.sigma_fin));
      r.direction = spec.direction;
      records.push_back(std::move(r));
    }
  }
  out.runs = RunSet(std::move(records));
  return out;
}

}  // namespace scalelaw
