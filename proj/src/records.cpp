#include "scalelaw/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scalelaw/error.hpp"
#include "scalelaw/scalecalc.hpp"

namespace scalelaw {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownFields = {
    "layers", "hidden", "params", "task", "family", "pretrain_seed",
    "finetune_seed", "metric", "value", "direction", "tokens"};

const std::vector<std::string> kCsvColumns = {
    "layers", "hidden", "params", "task", "family", "pretrain_seed",
    "finetune_seed", "metric", "value", "direction", "tokens"};

[[noreturn]] void row_error(std::size_t row, const std::string& field, const std::string& what) {
  std::ostringstream msg;
  msg << "row " << row;
  if (!field.empty()) msg << ", field '" << field << "'";
  msg << ": " << what;
  throw DataError(msg.str());
}

// Field values normalized to strings-or-numbers so JSONL and CSV share one
// validation path.
struct RawField {
  enum class Kind { integer, real, text } kind = Kind::text;
  std::int64_t i = 0;
  double d = 0.0;
  std::string s;
};

using RawRow = std::map<std::string, RawField>;

std::int64_t as_int(const RawRow& row, const std::string& name, std::size_t lineno) {
  const auto& f = row.at(name);
  if (f.kind == RawField::Kind::integer) return f.i;
  if (f.kind == RawField::Kind::real && std::isfinite(f.d) && f.d == std::floor(f.d) &&
      std::abs(f.d) < 9.0e15) {
    return static_cast<std::int64_t>(f.d);
  }
  row_error(lineno, name, "expected an integer");
}

double as_real(const RawRow& row, const std::string& name, std::size_t lineno) {
  const auto& f = row.at(name);
  if (f.kind == RawField::Kind::integer) return static_cast<double>(f.i);
  if (f.kind == RawField::Kind::real) return f.d;
  row_error(lineno, name, "expected a number");
}

std::string as_text(const RawRow& row, const std::string& name, std::size_t lineno) {
  const auto& f = row.at(name);
  if (f.kind != RawField::Kind::text) row_error(lineno, name, "expected a string");
  if (f.s.empty()) row_error(lineno, name, "must not be empty");
  return f.s;
}

RunRecord build_record(const RawRow& row, std::size_t lineno, std::vector<std::string>& warnings) {
  for (const auto& [name, _] : row) {
    if (!kKnownFields.count(name)) row_error(lineno, name, "unknown field");
  }
  for (const char* required : {"task", "family", "metric", "value", "direction"}) {
    if (!row.count(required)) row_error(lineno, required, "missing required field");
  }

  RunRecord rec;
  const bool has_layers = row.count("layers") > 0;
  const bool has_hidden = row.count("hidden") > 0;
  const bool has_params = row.count("params") > 0;
  if (has_layers != has_hidden) {
    row_error(lineno, has_layers ? "hidden" : "layers", "layers and hidden must be given together");
  }
  if (!has_layers && !has_params) {
    row_error(lineno, "params", "either layers+hidden or params is required");
  }
  try {
    if (has_layers) {
      const auto layers = as_int(row, "layers", lineno);
      const auto hidden = as_int(row, "hidden", lineno);
      if (layers < 1) row_error(lineno, "layers", "must be >= 1");
      if (hidden < 1) row_error(lineno, "hidden", "must be >= 1");
      if (has_params) {
        const auto params = as_int(row, "params", lineno);
        if (params < 1) row_error(lineno, "params", "must be >= 1");
        rec.scale = ScaleSpec::with_params(layers, hidden, params);
      } else {
        rec.scale = ScaleSpec::from_shape(layers, hidden);
      }
    } else {
      const auto params = as_int(row, "params", lineno);
      if (params < 1) row_error(lineno, "params", "must be >= 1");
      rec.scale = ScaleSpec::from_params(params);
    }
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    row_error(lineno, "params", e.what());
  }

  rec.task = as_text(row, "task", lineno);
  rec.family = as_text(row, "family", lineno);
  rec.metric = as_text(row, "metric", lineno);

  for (const char* seed : {"pretrain_seed", "finetune_seed"}) {
    std::int64_t v = 0;
    if (row.count(seed)) {
      v = as_int(row, seed, lineno);
    } else {
      warnings.push_back("row " + std::to_string(lineno) + ": " + seed + " absent, defaulting to 0");
    }
    (std::string(seed) == "pretrain_seed" ? rec.pretrain_seed : rec.finetune_seed) = v;
  }

  rec.value = as_real(row, "value", lineno);
  if (!std::isfinite(rec.value)) row_error(lineno, "value", "value must be finite");
  if (rec.value <= 0.0) row_error(lineno, "value", "value must be positive");

  try {
    rec.direction = parse_direction(as_text(row, "direction", lineno));
  } catch (const DataError& e) {
    row_error(lineno, "direction", e.what());
  }

  if (row.count("tokens")) {
    const auto tokens = as_int(row, "tokens", lineno);
    if (tokens < 0) row_error(lineno, "tokens", "must be nonnegative");
    rec.tokens = tokens;
  }
  return rec;
}

RawField from_json_value(const json& v, const std::string& name, std::size_t lineno) {
  RawField f;
  f.kind = RawField::Kind::text;
  if (v.is_number_integer()) {
    f.kind = RawField::Kind::integer;
    f.i = v.get<std::int64_t>();
  } else if (v.is_number_float()) {
    f.kind = RawField::Kind::real;
    f.d = v.get<double>();
  } else if (v.is_string()) {
    f.s = v.get<std::string>();
  } else {
    row_error(lineno, name, "unsupported JSON type");
  }
  return f;
}

RawField from_csv_cell(const std::string& cell) {
  RawField f;
  f.kind = RawField::Kind::text;
  f.s = cell;
  std::int64_t i = 0;
  auto [iend, iec] = std::from_chars(cell.data(), cell.data() + cell.size(), i);
  if (iec == std::errc() && iend == cell.data() + cell.size()) {
    f.kind = RawField::Kind::integer;
    f.i = i;
    return f;
  }
  double d = 0.0;
  auto [dend, dec] = std::from_chars(cell.data(), cell.data() + cell.size(), d);
  if (dec == std::errc() && dend == cell.data() + cell.size()) {
    f.kind = RawField::Kind::real;
    f.d = d;
  }
  return f;
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t lineno) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) row_error(lineno, "", "unterminated quoted cell");
  cells.push_back(std::move(cur));
  return cells;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_real(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

auto sort_key(const RunRecord& r) {
  return std::make_tuple(r.scale.params(), r.pretrain_seed, r.finetune_seed, r.value,
                         r.scale.layers(), r.scale.hidden(), r.tokens);
}

}  // namespace

Direction parse_direction(const std::string& token) {
  if (token == "max" || token == "maximize") return Direction::maximize;
  if (token == "min" || token == "minimize") return Direction::minimize;
  throw DataError("unknown direction '" + token + "' (expected max or min)");
}

const char* to_token(Direction d) { return d == Direction::maximize ? "max" : "min"; }

ScaleSpec ScaleSpec::from_shape(std::int64_t layers, std::int64_t hidden) {
  ScaleSpec s;
  s.params_ = param_count(layers, hidden);
  s.layers_ = layers;
  s.hidden_ = hidden;
  return s;
}

ScaleSpec ScaleSpec::with_params(std::int64_t layers, std::int64_t hidden, std::int64_t params) {
  if (layers < 1 || hidden < 1) throw DataError("layers and hidden must be >= 1");
  if (params < 1) throw DataError("params must be >= 1");
  ScaleSpec s;
  s.layers_ = layers;
  s.hidden_ = hidden;
  s.params_ = params;
  s.overridden_ = true;
  return s;
}

ScaleSpec ScaleSpec::from_params(std::int64_t params) {
  if (params < 1) throw DataError("params must be >= 1");
  ScaleSpec s;
  s.params_ = params;
  s.overridden_ = true;
  return s;
}

std::optional<AspectRatio> ScaleSpec::aspect_ratio() const {
  if (!layers_ || !hidden_) return std::nullopt;
  const auto g = std::gcd(*hidden_, *layers_);
  return AspectRatio{*hidden_ / g, *layers_ / g};
}

RunSet::RunSet(std::vector<RunRecord> records) : records_(std::move(records)) {
  if (records_.empty()) return;
  const auto& first = records_.front();
  key_ = GroupKey{first.task, first.family, first.metric};
  direction_ = first.direction;
  for (const auto& r : records_) {
    if (r.task != key_.task || r.family != key_.family || r.metric != key_.metric) {
      throw DataError("run set mixes groups: (" + key_.task + ", " + key_.family + ", " +
                      key_.metric + ") and (" + r.task + ", " + r.family + ", " + r.metric + ")");
    }
    if (r.direction != direction_) {
      throw DataError("mixed direction within group (" + key_.task + ", " + key_.family + ", " +
                      key_.metric + ")");
    }
  }
  std::stable_sort(records_.begin(), records_.end(),
                   [](const RunRecord& a, const RunRecord& b) { return sort_key(a) < sort_key(b); });
}

std::vector<std::int64_t> RunSet::scale_params() const {
  std::vector<std::int64_t> out;
  for (const auto& r : records_) {
    if (out.empty() || out.back() != r.scale.params()) out.push_back(r.scale.params());
  }
  return out;
}

std::vector<std::vector<std::size_t>> RunSet::scale_groups() const {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (i == 0 || records_[i].scale.params() != records_[i - 1].scale.params()) groups.emplace_back();
    groups.back().push_back(i);
  }
  return groups;
}

RecordFormat format_for_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv" ? RecordFormat::csv : RecordFormat::jsonl;
}

IngestResult ingest(const std::filesystem::path& path, RecordFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return format == RecordFormat::csv ? ingest_csv(in) : ingest_jsonl(in);
}

IngestResult ingest_jsonl(std::istream& in) {
  IngestResult result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      row_error(lineno, "", std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) row_error(lineno, "", "expected a JSON object");
    RawRow row;
    for (const auto& [k, v] : obj.items()) {
      if (v.is_null()) continue;
      row.emplace(k, from_json_value(v, k, lineno));
    }
    result.records.push_back(build_record(row, lineno, result.warnings));
  }
  return result;
}

IngestResult ingest_csv(std::istream& in) {
  IngestResult result;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (line.empty()) continue;
    auto cells = split_csv_line(line, lineno);
    if (header.empty()) {
      header = std::move(cells);
      std::set<std::string> seen;
      for (const auto& h : header) {
        if (!kKnownFields.count(h)) row_error(lineno, h, "unknown column");
        if (!seen.insert(h).second) row_error(lineno, h, "duplicate column");
      }
      continue;
    }
    if (cells.size() != header.size()) {
      row_error(lineno, "", "expected " + std::to_string(header.size()) + " cells, found " +
                                std::to_string(cells.size()));
    }
    RawRow row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) continue;
      row.emplace(header[c], from_csv_cell(cells[c]));
    }
    result.records.push_back(build_record(row, lineno, result.warnings));
  }
  if (header.empty()) throw DataError("CSV input has no header row");
  return result;
}

void emit_jsonl(std::ostream& out, const std::vector<RunRecord>& records) {
  for (const auto& r : records) {
    json obj;
    if (r.scale.has_shape()) {
      obj["layers"] = *r.scale.layers();
      obj["hidden"] = *r.scale.hidden();
    }
    if (r.scale.params_overridden()) obj["params"] = r.scale.params();
    obj["task"] = r.task;
    obj["family"] = r.family;
    obj["pretrain_seed"] = r.pretrain_seed;
    obj["finetune_seed"] = r.finetune_seed;
    obj["metric"] = r.metric;
    obj["value"] = r.value;
    obj["direction"] = to_token(r.direction);
    if (r.tokens) obj["tokens"] = *r.tokens;
    out << obj.dump() << '\n';
  }
}

void emit_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << '\n';
  for (const auto& r : records) {
    const auto opt = [](const std::optional<std::int64_t>& v) {
      return v ? std::to_string(*v) : std::string();
    };
    out << opt(r.scale.layers()) << ',' << opt(r.scale.hidden()) << ','
        << (r.scale.params_overridden() ? std::to_string(r.scale.params()) : std::string()) << ','
        << csv_quote(r.task) << ',' << csv_quote(r.family) << ',' << r.pretrain_seed << ','
        << r.finetune_seed << ',' << csv_quote(r.metric) << ',' << format_real(r.value) << ','
        << to_token(r.direction) << ',' << opt(r.tokens) << '\n';
  }
}

std::map<GroupKey, RunSet> group(const std::vector<RunRecord>& records) {
  std::map<GroupKey, std::vector<RunRecord>> buckets;
  for (const auto& r : records) buckets[GroupKey{r.task, r.family, r.metric}].push_back(r);
  std::map<GroupKey, RunSet> out;
  for (auto& [key, recs] : buckets) out.emplace(key, RunSet(std::move(recs)));
  return out;
}

RunSet filter_layers(const RunSet& set, std::int64_t lo, std::int64_t hi) {
  std::vector<RunRecord> kept;
  for (const auto& r : set.records()) {
    if (!r.scale.layers()) {
      throw DataError("record at params " + std::to_string(r.scale.params()) +
                      " lacks layer information; depth filtering needs layers");
    }
    const auto l = *r.scale.layers();
    if (l >= lo && l <= hi) kept.push_back(r);
  }
  return RunSet(std::move(kept));
}

}  // namespace scalelaw
