#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "scalelaw/cli.hpp"
#include "scalelaw/diagnose.hpp"
#include "scalelaw/predict.hpp"
#include "scalelaw/report.hpp"
#include "scalelaw/synth.hpp"
#include "test_support.hpp"

using namespace scalelaw;
using scalelaw::testing::data_path;
using scalelaw::testing::TempDir;
using nlohmann::json;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;

  json results() const { return parse_report(out).results; }
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunSet runs_8x5() {
  return RunSet(ingest(data_path("runs_8x5.jsonl"), RecordFormat::jsonl).records);
}

BootstrapConfig cfg(std::size_t b, std::uint64_t seed) {
  BootstrapConfig c;
  c.replicates = b;
  c.rng_seed = seed;
  return c;
}

const std::string kRuns = data_path("runs_8x5.jsonl").string();

}  // namespace

TEST_CASE("fit matches the library", "[cli]") {
  const auto o = run_cli({"fit", "--input", kRuns});
  REQUIRE(o.code == 0);
  CHECK(o.results()["fit"] == json(fit_runset(runs_8x5())));
  CHECK(o.results()["runset"]["n_scales"] == 8);
  CHECK(parse_report(o.out).command == "fit");

  const auto depth = run_cli({"fit", "--input", kRuns, "--min-depth", "3", "--r2-space", "linear"});
  REQUIRE(depth.code == 0);
  CHECK(depth.results()["fit"] == json(fit_filtered(runs_8x5(), 3, ResidualSpace::linear)));

  const auto csv = run_cli({"fit", "--input", data_path("runs_8x5.csv").string()});
  REQUIRE(csv.code == 0);
  CHECK(csv.results()["fit"] == o.results()["fit"]);
}

TEST_CASE("usage errors exit with 1", "[cli]") {
  CHECK(run_cli({"fit"}).code == cli::kExitUsage);
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run_cli({"bootstrap", "--input", kRuns}).code == cli::kExitUsage);
  CHECK(run_cli({"predict", "--input", kRuns, "--target-params", "100"}).code == cli::kExitUsage);
  CHECK(run_cli({"predict", "--input", kRuns, "--seed", "1"}).code == cli::kExitUsage);
  CHECK(run_cli({"bootstrap", "--input", kRuns, "--seed", "1", "--mode", "bogus"}).code == cli::kExitUsage);
  CHECK(run_cli({"--format", "xml", "fit", "--input", kRuns}).code == cli::kExitUsage);
  CHECK(run_cli({"holdout", "--input", kRuns, "--train-layers", "x", "--test-layers", "7-8"}).code ==
        cli::kExitUsage);
  CHECK(run_cli({"flops", "--params", "5"}).code == cli::kExitUsage);
  CHECK(run_cli({"plot", "--input", kRuns, "--out", "/tmp/x.svg", "--band"}).code == cli::kExitUsage);
  const auto two = run_cli({"fit", "--input", data_path("two_families.jsonl").string()});
  CHECK(two.code == cli::kExitUsage);
  CHECK(two.err.find("ambiguous") != std::string::npos);
}

TEST_CASE("data errors exit with 2", "[cli]") {
  CHECK(run_cli({"fit", "--input", "/nonexistent.jsonl"}).code == cli::kExitData);
  CHECK(run_cli({"fit", "--input", kRuns, "--task", "nope"}).code == cli::kExitData);
  const auto mm = run_cli({"select", "--input", data_path("mismatched_metrics.jsonl").string(), "--family-a",
                           "mlm", "--family-b", "pmi", "--target-params", "84934656", "--seed", "1", "--B", "20"});
  CHECK(mm.code == cli::kExitData);
  CHECK(mm.err.find("'f1'") != std::string::npos);
  CHECK(mm.err.find("'acc'") != std::string::npos);
  CHECK(run_cli({"diagnose", "fit-outlier", "--input", kRuns, "--seed", "1", "--holdout-layers", "8",
                 "--observed", "3"})
            .code == cli::kExitData);
}

TEST_CASE("bootstrap and predict match the library", "[cli]") {
  const auto set = runs_8x5();
  const auto bs = run_cli({"bootstrap", "--input", kRuns, "--seed", "7", "--B", "200", "--grid-points", "6",
                           "--grid-max", "84934656"});
  REQUIRE(bs.code == 0);
  const auto grid = log_grid(12'288, 84'934'656, 6);
  CHECK(bs.results()["band"] == json(bootstrap(set, cfg(200, 7), grid)));

  const auto pr = run_cli({"predict", "--input", kRuns, "--seed", "7", "--B", "200", "--target-layers", "12",
                           "--target-hidden", "768", "--actual", "88"});
  REQUIRE(pr.code == 0);
  CHECK(pr.results()["prediction"] == json(extrapolate(set, ScaleSpec::from_shape(12, 768), cfg(200, 7), 88.0)));
  CHECK(pr.results()["target"]["params"] == 84'934'656);

  const auto naive = run_cli({"predict", "--input", kRuns, "--seed", "7", "--B", "200", "--mode", "naive",
                              "--target-params", "84934656"});
  REQUIRE(naive.code == 0);
  auto ncfg = cfg(200, 7);
  ncfg.mode = BootstrapMode::naive;
  CHECK(naive.results()["prediction"] == json(extrapolate(set, ScaleSpec::from_params(84'934'656), ncfg)));
}

TEST_CASE("holdout and select match the library", "[cli]") {
  const auto ho = run_cli({"holdout", "--input", kRuns, "--train-layers", "1-6", "--test-layers", "7-8"});
  REQUIRE(ho.code == 0);
  CHECK(ho.results()["prediction"] == json(holdout_eval(runs_8x5(), {1, 6}, {7, 8})));

  const auto path = data_path("two_families.jsonl").string();
  const auto se = run_cli({"select", "--input", path, "--family-a", "mlm", "--family-b", "pmi",
                           "--target-layers", "12", "--target-hidden", "768", "--seed", "3", "--B", "100",
                           "--actual-a", "86", "--actual-b", "88"});
  REQUIRE(se.code == 0);
  const auto groups = group(ingest(path, RecordFormat::jsonl).records);
  const auto& a = groups.at({"squad", "mlm", "f1"});
  const auto& b = groups.at({"squad", "pmi", "f1"});
  const auto expected =
      select_model(a, b, ScaleSpec::from_shape(12, 768), kDefaultR2Threshold, cfg(100, 3), 86.0, 88.0);
  CHECK(se.results()["selection"] == json(expected));
  CHECK(expected.predicted_gap > 0);
  CHECK(expected.sign_agreement.value());
}

TEST_CASE("flops modes", "[cli]") {
  const auto one = run_cli({"flops", "--params", "84934656", "--tokens", "1000000"});
  REQUIRE(one.code == 0);
  CHECK(one.results()["compute"]["flops"] == 509'607'936'000'000LL);

  const auto sav = run_cli({"flops", "--aspect-ratio", "32", "--small-layers", "1-8", "--large-layers", "12",
                            "--large-hidden", "768"});
  REQUIRE(sav.code == 0);
  CHECK(sav.results()["small_total_params"] == 15'925'248);
  CHECK(sav.results()["large_params"] == 84'934'656);
  CHECK(sav.results()["savings_ratio"].get<double>() == Catch::Approx(84'934'656.0 / 15'925'248.0));

  const auto rec = run_cli({"flops", "--input", kRuns});
  REQUIRE(rec.code == 0);
  CHECK(rec.results()["records"].size() == 40);
  CHECK(rec.results()["records_without_tokens"] == 0);
}

TEST_CASE("diagnose subcommands match the library", "[cli]") {
  const auto curve = data_path("plateau_curve.csv").string();
  const auto es = run_cli({"diagnose", "earlystop", "--curve", curve, "--patience", "6", "--patience", "3"});
  REQUIRE(es.code == 0);
  CHECK(es.results()["policies"] == json(compare_policies(read_loss_curve(curve), {{3, 0.0}, {6, 0.0}})));
  CHECK(es.results()["policies"][0]["loss_at_best"] == 2.35);
  CHECK(es.results()["policies"][1]["loss_at_best"] == 1.95);

  const auto loss = data_path("loss_8x3.jsonl").string();
  const auto fo = run_cli({"diagnose", "fit-outlier", "--input", loss, "--seed", "2", "--B", "200",
                           "--holdout-layers", "8", "--observed", "5.0"});
  REQUIRE(fo.code == 0);
  const RunSet set(ingest(loss, RecordFormat::jsonl).records);
  const auto v = flag_undertrained(exclude_layers(set, 8), ScaleSpec::from_shape(8, 256), 5.0, cfg(200, 2));
  CHECK(fo.results()["verdict"] == json(v));
  CHECK(fo.results()["verdict"]["flag"] == "suspect_undertrained");
}

TEST_CASE("synth writes records and truth", "[cli]") {
  TempDir dir("cli-synth");
  const auto out = (dir / "runs.jsonl").string();
  const auto o = run_cli({"synth", "--seed", "11", "--out", out, "--sigma-pre", "0.02"});
  REQUIRE(o.code == 0);
  CHECK(o.results()["records"] == 40);
  auto spec = scalelaw::testing::ar32_spec(0.08, 3.0, 0.02, 0.01, 11);
  CHECK(ingest(out, RecordFormat::jsonl).records == generate(spec).runs.records());
  const auto truth = json::parse(slurp(out + ".truth.json"));
  CHECK(truth["true_alpha"] == 0.08);
  CHECK(truth["scales"].size() == 8);

  // The written file feeds straight back into fit.
  CHECK(run_cli({"fit", "--input", out}).code == 0);
}

TEST_CASE("plot writes an SVG", "[cli]") {
  TempDir dir("cli-plot");
  const auto svg = (dir / "p.svg").string();
  const auto o = run_cli({"plot", "--input", kRuns, "--out", svg, "--band", "--seed", "1", "--B", "100",
                          "--grid-points", "9", "--holdout-layers", "7-8", "--title", "squad"});
  REQUIRE(o.code == 0);
  CHECK(o.results()["markers"] == 30);
  CHECK(o.results()["held_out_markers"] == 10);
  CHECK(o.results()["band_points"] == 9);
  const auto text = slurp(svg);
  CHECK(text.find("class=\"sleeve\"") != std::string::npos);
  CHECK(text.find("class=\"held-out\"") != std::string::npos);
}

TEST_CASE("table output", "[cli]") {
  const auto o = run_cli({"--format", "table", "fit", "--input", kRuns});
  REQUIRE(o.code == 0);
  CHECK(o.out.rfind("command  fit\n", 0) == 0);
  CHECK(o.out.find("fit.alpha  ") != std::string::npos);
}

TEST_CASE("thread count never changes outputs", "[cli]") {
  TempDir dir("cli-threads");
  const auto svg = (dir / "p.svg").string();
  const std::vector<std::vector<std::string>> commands{
      {"bootstrap", "--input", kRuns, "--seed", "5", "--B", "300"},
      {"predict", "--input", kRuns, "--seed", "5", "--B", "300", "--target-params", "84934656"},
      {"plot", "--input", kRuns, "--out", svg, "--band", "--seed", "5", "--B", "300"},
  };
  for (const auto& base : commands) {
    std::vector<std::string> outputs;
    std::vector<std::string> svgs;
    for (const char* threads : {"1", "2", "4"}) {
      auto args = base;
      args.insert(args.end(), {"--threads", threads});
      const auto o = run_cli(args);
      REQUIRE(o.code == 0);
      outputs.push_back(o.out);
      if (base.front() == "plot") svgs.push_back(slurp(svg));
    }
    CHECK(outputs[0] == outputs[1]);
    CHECK(outputs[0] == outputs[2]);
    if (!svgs.empty()) {
      CHECK(svgs[0] == svgs[1]);
      CHECK(svgs[0] == svgs[2]);
    }
  }
}
