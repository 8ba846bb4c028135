#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

namespace scalelaw {

enum class Direction { maximize, minimize };

/// Parses "max"/"maximize"/"min"/"minimize". Throws DataError otherwise.
Direction parse_direction(const std::string& token);
/// Canonical short token ("max" / "min").
const char* to_token(Direction d);

/// Exact H/L ratio kept in lowest terms.
struct AspectRatio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const AspectRatio&, const AspectRatio&) = default;
};

/// A model configuration. Depth and width are absent when the source only
/// reported a parameter count.
class ScaleSpec {
 public:
  /// params = 12 * layers * hidden^2.
  static ScaleSpec from_shape(std::int64_t layers, std::int64_t hidden);
  /// Shape known, parameter count supplied by the user.
  static ScaleSpec with_params(std::int64_t layers, std::int64_t hidden, std::int64_t params);
  /// Only the parameter count is known.
  static ScaleSpec from_params(std::int64_t params);

  std::optional<std::int64_t> layers() const { return layers_; }
  std::optional<std::int64_t> hidden() const { return hidden_; }
  std::int64_t params() const { return params_; }
  bool params_overridden() const { return overridden_; }
  bool has_shape() const { return layers_.has_value(); }
  std::optional<AspectRatio> aspect_ratio() const;

  friend bool operator==(const ScaleSpec&, const ScaleSpec&) = default;

 private:
  std::optional<std::int64_t> layers_;
  std::optional<std::int64_t> hidden_;
  std::int64_t params_ = 0;
  bool overridden_ = false;
};

struct RunRecord {
  ScaleSpec scale;
  std::string task;
  std::string family;
  std::int64_t pretrain_seed = 0;
  std::int64_t finetune_seed = 0;
  std::string metric;
  double value = 0.0;
  Direction direction = Direction::maximize;
  std::optional<std::int64_t> tokens;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct GroupKey {
  std::string task;
  std::string family;
  std::string metric;

  auto operator<=>(const GroupKey&) const = default;
};

/// Records sharing one (task, family, metric), sorted by
/// (params, pretrain_seed, finetune_seed).
class RunSet {
 public:
  RunSet() = default;
  /// Validates agreement on key and direction, then sorts.
  explicit RunSet(std::vector<RunRecord> records);

  const std::vector<RunRecord>& records() const { return records_; }
  const GroupKey& key() const { return key_; }
  Direction direction() const { return direction_; }
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }

  /// Distinct parameter counts, ascending (the M scales).
  std::vector<std::int64_t> scale_params() const;
  /// Record indices per distinct scale, aligned with scale_params().
  std::vector<std::vector<std::size_t>> scale_groups() const;
  std::size_t num_scales() const { return scale_params().size(); }

 private:
  std::vector<RunRecord> records_;
  GroupKey key_;
  Direction direction_ = Direction::maximize;
};

enum class RecordFormat { jsonl, csv };

/// Picks the format from the file extension (.csv -> csv, anything else jsonl).
RecordFormat format_for_path(const std::filesystem::path& path);

struct IngestResult {
  std::vector<RunRecord> records;
  std::vector<std::string> warnings;
};

IngestResult ingest(const std::filesystem::path& path, RecordFormat format);
IngestResult ingest_jsonl(std::istream& in);
IngestResult ingest_csv(std::istream& in);

/// Canonical JSONL emission; ingest_jsonl(emit_jsonl(r)) == r.
void emit_jsonl(std::ostream& out, const std::vector<RunRecord>& records);
void emit_csv(std::ostream& out, const std::vector<RunRecord>& records);

std::map<GroupKey, RunSet> group(const std::vector<RunRecord>& records);

/// Records whose depth lies in [lo, hi]. Throws DataError if any record lacks
/// layer information.
RunSet filter_layers(const RunSet& set, std::int64_t lo, std::int64_t hi);

}  // namespace scalelaw
