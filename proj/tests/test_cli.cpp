#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "vitality/pipeline.hpp"
#include "vitality/synth.hpp"

namespace fs = std::filesystem;

namespace {

std::string g_cli;

int run(const std::string& args, const fs::path& stderr_to = {}) {
  std::string cmd = g_cli + " " + args + " > /dev/null";
  cmd += stderr_to.empty() ? " 2> /dev/null" : " 2> " + stderr_to.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string common(const fs::path& w) { return "--workdir " + w.string() + " --seed 21"; }

}  // namespace

TEST_CASE("full pipeline produces every artifact and stays idempotent") {
  const fs::path w = fresh_dir("vitality_cli_smoke");
  const std::string c = common(w);
  const std::string train_opts = " --min-samples-leaf 5 --rounds 60 --early-stopping 10";

  REQUIRE(run("synth " + c + " --healthy 12 --quiet 6 --decaying 12 --abrupt 6") == 0);
  REQUIRE(run("ingest " + c) == 0);
  REQUIRE(run("influence " + c) == 0);
  REQUIRE(run("features " + c) == 0);
  REQUIRE(run("train " + c + train_opts) == 0);
  REQUIRE(run("train " + c + " --gbsa" + train_opts) == 0);
  REQUIRE(run("evaluate " + c + train_opts) == 0);
  REQUIRE(run("ablate " + c + train_opts) == 0);
  REQUIRE(run("predict " + c) == 0);

  for (const char* artifact :
       {"events.jsonl", "labels.jsonl", "timelines.json", "ingest_report.json", "influence.csv",
        "features.csv", "model.json", "model_gbsa.json", "train_log.csv", "report.csv",
        "ablation.csv", "ablation.txt", "importance.csv", "predictions.csv"}) {
    CAPTURE(artifact);
    CHECK(fs::exists(w / artifact));
  }

  SUBCASE("tuned training persists the trial log") {
    REQUIRE(run("train " + c + " --tune 3 --rounds 30 --early-stopping 5") == 0);
    CHECK(fs::exists(w / "trials.csv"));
    std::ifstream in(w / "trials.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.find("trial,metric,learning_rate") == 0);
    int rows = 0;
    for (std::string line; std::getline(in, line);) rows += !line.empty();
    CHECK(rows == 3);
  }

  SUBCASE("json report format and threshold validation") {
    CHECK(run("evaluate " + c + " --format json" + train_opts) == 0);
    CHECK(run("evaluate " + c + " --gbsa --threshold 0.3" + train_opts) == 0);
    CHECK(run("evaluate " + c + " --gbsa --threshold 1.5" + train_opts) == 3);
  }

  SUBCASE("rerunning a stage with the same seed is byte-identical") {
    const std::string before = slurp(w / "features.csv");
    REQUIRE(run("features " + c) == 0);
    CHECK(slurp(w / "features.csv") == before);
    const std::string model_before = slurp(w / "model.json");
    REQUIRE(run("train " + c + train_opts) == 0);
    CHECK(slurp(w / "model.json") == model_before);
  }

  SUBCASE("predictions are sorted by descending risk") {
    std::ifstream in(w / "predictions.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "repo_id,risk");
    double prev = std::numeric_limits<double>::infinity();
    int rows = 0;
    while (std::getline(in, line)) {
      const auto comma = line.rfind(',');
      const double risk = std::stod(line.substr(comma + 1));
      CHECK(risk <= prev);
      prev = risk;
      ++rows;
    }
    CHECK(rows > 20);
  }

  SUBCASE("plot emits normalized CSV and SVG for a known repo") {
    REQUIRE(run("plot " + c + " --repo synth/decaying-003 --from 2017-06 --to 2018-03") == 0);
    const fs::path csv = w / "plot_synth_decaying-003.csv";
    REQUIRE(fs::exists(csv));
    REQUIRE(fs::exists(w / "plot_synth_decaying-003.svg"));
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line ==
          "month,stars,weight_rank_pct,latest_maintainer_activity_interval,"
          "maintainer_contrib_ratio");
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string cell;
      std::getline(ss, cell, ',');  // month
      while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        const double v = std::stod(cell);
        CHECK(v >= 0.1 - 1e-12);
        CHECK(v <= 1.0 + 1e-12);
      }
    }
    const std::string svg = slurp(w / "plot_synth_decaying-003.svg");
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("latest_maintainer_activity_interval") != std::string::npos);
  }

  SUBCASE("unknown plot feature exits 3 and lists valid names") {
    const fs::path err = w / "plot_err.json";
    CHECK(run("plot " + c + " --repo synth/decaying-003 --features bogus_feature", err) == 3);
    const std::string msg = slurp(err);
    CHECK(msg.find("bogus_feature") != std::string::npos);
    CHECK(msg.find("weight_zscore") != std::string::npos);  // the valid list
  }
}

TEST_CASE("stage ordering: train without features names the missing file") {
  const fs::path w = fresh_dir("vitality_cli_order");
  const fs::path err = w / "err.json";
  CHECK(run("train " + common(w), err) == 2);
  const std::string msg = slurp(err);
  CHECK(msg.find("features.csv") != std::string::npos);
  CHECK(msg.find("\"code\":2") != std::string::npos);

  CHECK(run("influence " + common(w), err) == 2);
  CHECK(slurp(err).find("timelines.json") != std::string::npos);
}

TEST_CASE("config file supplies defaults, flags still win") {
  const fs::path w = fresh_dir("vitality_cli_config");
  const fs::path conf = w / "run.json";
  {
    std::ofstream out(conf);
    out << R"({"workdir":")" << w.string() << R"(","seed":5})";
  }
  CHECK(run("synth --config " + conf.string() +
            " --healthy 2 --quiet 1 --decaying 2 --abrupt 1") == 0);
  CHECK(fs::exists(w / "events.jsonl"));
  const std::string manifest = slurp(w / "run_synth.json");
  CHECK(manifest.find("\"seed\": 5") != std::string::npos);
}

TEST_CASE("features refuses a stale influence snapshot month") {
  const fs::path w = fresh_dir("vitality_cli_stale");
  const std::string c = common(w);
  REQUIRE(run("synth " + c + " --healthy 3 --quiet 1 --decaying 3 --abrupt 1") == 0);
  REQUIRE(run("ingest " + c) == 0);
  REQUIRE(run("influence " + c + " --as-of 2017-03") == 0);
  const fs::path err = w / "err.json";
  CHECK(run("features " + c + " --as-of 2018-06", err) == 3);
  const std::string msg = slurp(err);
  CHECK(msg.find("2017-03") != std::string::npos);
  CHECK(run("features " + c + " --as-of 2017-03") == 0);
}

TEST_CASE("VITALITY_WORKDIR provides the workdir default") {
  const fs::path w = fresh_dir("vitality_cli_env");
  const std::string cmd = "VITALITY_WORKDIR=" + w.string() + " " + g_cli +
                          " synth --seed 3 --healthy 2 --quiet 1 --decaying 2 --abrupt 1"
                          " > /dev/null 2> /dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(fs::exists(w / "events.jsonl"));
}

TEST_CASE("decaying repos plot a rising inactivity curve into cessation") {
  using namespace vitality;
  ScenarioSpec spec;
  spec.healthy = 6;
  spec.decaying = 8;
  const auto corpus = generate_synthetic_corpus(spec, 606);
  int checked = 0;
  for (const auto& t : corpus) {
    if (!t.label.ceased()) continue;
    const YearMonth cess = ym_of(*t.label.cessation_time);
    const YearMonth to = add_months(cess, -1), from = add_months(cess, -10);
    if (from < t.creation_month()) continue;
    const auto plot = pipeline::plot_series(
        corpus, t.repo_id, {"latest_maintainer_activity_interval"}, from, to);
    const auto& series = plot.series.at(0).normalized;
    REQUIRE(!series.empty());
    CAPTURE(t.repo_id);
    CHECK(series.back() == 1.0);       // the max sits at the final pre-cessation month
    CHECK(series.front() < series.back());
    ++checked;
  }
  CHECK(checked >= 6);
}

TEST_CASE("plot normalization maps {2,4,6} to {0.1,0.55,1.0} exactly") {
  using vitality::pipeline::minmax_normalize;
  const auto out = minmax_normalize({2.0, 4.0, 6.0});
  REQUIRE(out.size() == 3);
  CHECK(out[0] == 0.1);
  CHECK(out[1] == 0.55);
  CHECK(out[2] == 1.0);

  const auto constant = minmax_normalize({3.0, 3.0, 3.0});
  for (double v : constant) CHECK(v == 0.55);

  const auto with_gap = minmax_normalize({2.0, std::nan(""), 6.0});
  CHECK(with_gap[0] == 0.1);
  CHECK(std::isnan(with_gap[1]));
  CHECK(with_gap[2] == 1.0);
}

int main(int argc, char** argv) {
  doctest::Context context;
  // the CLI binary path arrives as the last non-doctest argument (from ctest)
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg = argv[i];
    if (!arg.starts_with("-")) g_cli = arg;
  }
  context.applyCommandLine(argc, argv);
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-vitality-binary>\n");
    return 1;
  }
  return context.run();
}
