#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>

#include "scalelaw/error.hpp"
#include "scalelaw/records.hpp"
#include "test_support.hpp"

using namespace scalelaw;
using scalelaw::testing::data_path;

namespace {

IngestResult parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  return ingest_jsonl(in);
}

RunRecord make(std::int64_t layers, const std::string& task, const std::string& family, double value,
               std::int64_t fin = 0, Direction dir = Direction::maximize) {
  RunRecord r;
  r.scale = ScaleSpec::from_shape(layers, 32 * layers);
  r.task = task;
  r.family = family;
  r.metric = "f1";
  r.finetune_seed = fin;
  r.value = value;
  r.direction = dir;
  return r;
}

// Random records over every optional-field combination.
std::vector<RunRecord> random_records(std::mt19937_64& gen, int n) {
  std::uniform_int_distribution<int> small(1, 12);
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_real_distribution<double> val(1e-6, 1e3);
  const char* names[] = {"a", "squad, v1", "mnli \"m\"", "x_y"};
  std::vector<RunRecord> out;
  for (int i = 0; i < n; ++i) {
    RunRecord r;
    const int shape = pick(gen);
    const std::int64_t l = small(gen);
    const std::int64_t h = 16 * small(gen);
    if (shape == 0) {
      r.scale = ScaleSpec::from_params(1000 + small(gen) * 17);
    } else if (shape == 1) {
      r.scale = ScaleSpec::with_params(l, h, 5000 + small(gen));
    } else {
      r.scale = ScaleSpec::from_shape(l, h);
    }
    r.task = names[pick(gen)];
    r.family = names[pick(gen)];
    r.metric = names[pick(gen)];
    r.pretrain_seed = small(gen) - 3;
    r.finetune_seed = small(gen);
    r.value = val(gen);
    r.direction = pick(gen) % 2 ? Direction::maximize : Direction::minimize;
    if (pick(gen) % 2) r.tokens = small(gen) * 1'000'003LL;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("a shaped row derives its parameter count", "[records]") {
  const auto res = parse_jsonl(
      R"({"layers":1,"hidden":32,"task":"t","family":"mlm","pretrain_seed":0,"finetune_seed":0,"metric":"f1","value":50.0,"direction":"max"})");
  REQUIRE(res.records.size() == 1);
  const auto& r = res.records.front();
  CHECK(r.scale.params() == 12'288);
  CHECK(r.direction == Direction::maximize);
  CHECK(r.value == 50.0);
  CHECK_FALSE(r.tokens.has_value());
  CHECK(res.warnings.empty());
}

TEST_CASE("aspect ratio is hidden over layers", "[records]") {
  const auto bert = ScaleSpec::from_shape(12, 768);
  REQUIRE(bert.aspect_ratio());
  CHECK(bert.aspect_ratio()->value() == 64.0);
  CHECK(*bert.aspect_ratio() == AspectRatio{64, 1});
  CHECK(*ScaleSpec::from_shape(3, 32).aspect_ratio() == AspectRatio{32, 3});
  CHECK_FALSE(ScaleSpec::from_params(10).aspect_ratio());
}

TEST_CASE("invalid rows name the row and the field", "[records]") {
  const std::string good_prefix =
      R"({"layers":1,"hidden":32,"task":"t","family":"f","pretrain_seed":0,"finetune_seed":0,"metric":"m","direction":"max","value":50}
)";
  auto expect_error = [&](const std::string& row, const std::string& needle) {
    try {
      parse_jsonl(good_prefix + row);
      FAIL("expected DataError for " << row);
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("row 2") != std::string::npos);
      CHECK(msg.find(needle) != std::string::npos);
    }
  };
  expect_error(R"({"layers":1,"hidden":32,"task":"t","family":"f","metric":"m","value":-1,"direction":"max"})",
               "value must be positive");
  expect_error(R"({"layers":1,"hidden":32,"task":"t","family":"f","metric":"m","value":0,"direction":"max"})",
               "value must be positive");
  expect_error(R"({"layers":1,"hidden":32,"task":"t","family":"f","metric":"m","value":1,"direction":"up"})",
               "direction");
  expect_error(R"({"layers":1,"task":"t","family":"f","metric":"m","value":1,"direction":"max"})", "hidden");
  expect_error(R"({"layers":1,"hidden":32,"family":"f","metric":"m","value":1,"direction":"max"})", "task");
  expect_error(R"({"layers":1,"hidden":32,"task":"t","family":"f","metric":"m","value":"x","direction":"max"})",
               "value");
  expect_error(R"({"layers":1,"hidden":32,"task":"t","family":"f","metric":"m","value":1,"direction":"max","bogus":1})",
               "bogus");
  expect_error("{not json", "malformed JSON");
}

TEST_CASE("params-only rows are accepted but fail depth filtering", "[records]") {
  const auto res = parse_jsonl(
      R"({"params":5000,"task":"t","family":"f","pretrain_seed":1,"finetune_seed":2,"metric":"m","value":3.5,"direction":"min","tokens":100})");
  REQUIRE(res.records.size() == 1);
  const auto& r = res.records.front();
  CHECK(r.scale.params() == 5000);
  CHECK_FALSE(r.scale.layers());
  CHECK(r.tokens == 100);
  CHECK(r.direction == Direction::minimize);
  CHECK_THROWS_AS(filter_layers(RunSet(res.records), 1, 8), DataError);
}

TEST_CASE("missing seeds default to zero with a warning", "[records]") {
  const auto res =
      parse_jsonl(R"({"layers":2,"hidden":64,"task":"t","family":"f","metric":"m","value":3.5,"direction":"max"})");
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].pretrain_seed == 0);
  CHECK(res.records[0].finetune_seed == 0);
  CHECK(res.warnings.size() == 2);
}

TEST_CASE("the 8x5 fixture has M = 8 scales of T = 5 runs", "[records]") {
  for (auto name : {"runs_8x5.jsonl", "runs_8x5.csv"}) {
    const auto path = data_path(name);
    const auto res = ingest(path, format_for_path(path));
    REQUIRE(res.records.size() == 40);
    const auto groups = group(res.records);
    REQUIRE(groups.size() == 1);
    const auto& set = groups.begin()->second;
    CHECK(set.num_scales() == 8);
    for (const auto& g : set.scale_groups()) CHECK(g.size() == 5);
  }
}

TEST_CASE("CSV and JSONL fixtures ingest to the same records", "[records]") {
  const auto a = ingest(data_path("runs_8x5.jsonl"), RecordFormat::jsonl).records;
  const auto b = ingest(data_path("runs_8x5.csv"), RecordFormat::csv).records;
  CHECK(a == b);
}

TEST_CASE("grouping partitions by task, family and metric", "[records]") {
  CHECK(group({}).empty());

  const std::vector<RunRecord> two_tasks{make(1, "a", "mlm", 1.0), make(2, "b", "mlm", 2.0),
                                         make(3, "a", "mlm", 3.0)};
  CHECK(group(two_tasks).size() == 2);

  std::vector<RunRecord> grid;
  for (int t = 0; t < 9; ++t) {
    for (const char* fam : {"mlm", "pmi"}) {
      for (int l = 1; l <= 3; ++l) grid.push_back(make(l, "task" + std::to_string(t), fam, 10.0 + l));
    }
  }
  const auto groups = group(grid);
  CHECK(groups.size() == 18);
  std::size_t total = 0;
  for (const auto& [key, set] : groups) {
    total += set.size();
    for (const auto& r : set.records()) {
      CHECK(r.task == key.task);
      CHECK(r.family == key.family);
    }
  }
  CHECK(total == grid.size());
}

TEST_CASE("mixed direction inside a group is rejected", "[records]") {
  const std::vector<RunRecord> recs{make(1, "a", "mlm", 1.0), make(2, "a", "mlm", 2.0, 0, Direction::minimize)};
  CHECK_THROWS_AS(group(recs), DataError);
}

TEST_CASE("run set order depends only on field values", "[records][property]") {
  std::mt19937_64 gen(5);
  auto recs = random_records(gen, 60);
  for (auto& r : recs) {
    r.task = "t";
    r.family = "f";
    r.metric = "m";
    r.direction = Direction::maximize;
  }
  const RunSet reference(recs);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(recs.begin(), recs.end(), gen);
    CHECK(RunSet(recs).records() == reference.records());
  }
  const auto& sorted = reference.records();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    CHECK(std::make_tuple(sorted[i - 1].scale.params(), sorted[i - 1].pretrain_seed, sorted[i - 1].finetune_seed) <=
          std::make_tuple(sorted[i].scale.params(), sorted[i].pretrain_seed, sorted[i].finetune_seed));
  }
}

TEST_CASE("emit then ingest is the identity", "[records][property]") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 25; ++trial) {
    const auto recs = random_records(gen, 30);
    std::stringstream jsonl;
    emit_jsonl(jsonl, recs);
    CHECK(ingest_jsonl(jsonl).records == recs);
    std::stringstream csv;
    emit_csv(csv, recs);
    CHECK(ingest_csv(csv).records == recs);
  }
}

TEST_CASE("filter_layers keeps an inclusive depth range", "[records]") {
  std::vector<RunRecord> recs;
  for (int l = 1; l <= 8; ++l) recs.push_back(make(l, "a", "mlm", 10.0 + l));
  const RunSet set(recs);
  const auto mid = filter_layers(set, 3, 5);
  CHECK(mid.num_scales() == 3);
  CHECK(*mid.records().front().scale.layers() == 3);
  CHECK(*mid.records().back().scale.layers() == 5);
  CHECK(filter_layers(set, 9, 12).empty());
}
