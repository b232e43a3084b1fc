#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "doctest.h"
#include "defminer/artifacts.hpp"
#include "defminer/error.hpp"
#include "defminer/pipeline.hpp"

using namespace defminer;
namespace fs = std::filesystem;

namespace {

const fs::path kData = DEFMINER_DATA_DIR;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("defminer_pipeline_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

PipelineConfig fixture_config(const std::string& name) {
  PipelineConfig c;
  c.input = kData / "fixture" / "corpus.jsonl";
  c.domain_rules = kData / "domain_rules.json";
  c.filter_rules = kData / "filter_rules.json";
  c.lexicon = kData / "lexicon.json";
  c.output_dir = scratch(name);
  return c;
}

}  // namespace

TEST_CASE("fixture run produces a full table and a monotone funnel") {
  const auto cfg = fixture_config("full");
  const auto m = run_pipeline(cfg);
  const Layout out{cfg.output_dir};
  CHECK(m.counts.at("documents") == 30);
  CHECK(m.counts.at("candidates") <= m.counts.at("candidates_raw"));
  CHECK(m.counts.at("kept") <= m.counts.at("candidates"));
  CHECK(m.counts.at("survivors") <= m.counts.at("kept"));
  CHECK(m.counts.at("survivors") >= 1);

  const auto t = read_contingency(out.contingency());
  CHECK(t.rows.size() == 16);
  CHECK(t.cols.size() == 4);
  CHECK(read_json(out.chisq()).at("dof") == 45);
  CHECK(fs::exists(out.digest()));
  CHECK(fs::exists(out.freq_ngram(3, FrequencyScope::survey)));
  CHECK(manifest_from_json(read_json(out.run_manifest())).stages.size() == 9);
}

TEST_CASE("rerun with the same config gives identical statistics") {
  auto cfg = fixture_config("rerun_a");
  run_pipeline(cfg);
  const auto a = read_file(Layout{cfg.output_dir}.chisq());
  run_pipeline(cfg);
  CHECK(read_file(Layout{cfg.output_dir}.chisq()) == a);
}

TEST_CASE("increasing ks abort in the cluster stage") {
  auto cfg = fixture_config("bad_ks");
  cfg.ks = {10, 20};
  try {
    run_pipeline(cfg);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "cluster");
    CHECK(e.exit_code() == 1);
  }
  CHECK(fs::exists(Layout{cfg.output_dir}.vectors()));
}

TEST_CASE("nothing surviving the filter still yields a report") {
  auto cfg = fixture_config("empty");
  const auto corpus = cfg.output_dir / "corpus.jsonl";
  std::ofstream(corpus) << R"({"id":"x","title":"t","year":2020,"domain":"urban","text":"Digital twin is a new paradigm in simulation."})"
                        << "\n";
  cfg.input = corpus;
  cfg.output_dir /= "out";
  const auto m = run_pipeline(cfg);
  CHECK(m.counts.at("survivors") == 0);
  const Layout out{cfg.output_dir};
  CHECK(read_json(out.chisq()).at("status") == "skipped");
  CHECK(read_file(out.digest()).find("no definitions survived") != std::string::npos);
}

TEST_CASE("report needs its inputs") {
  const auto cfg = fixture_config("missing");
  const auto m = run_pipeline(cfg);
  const Layout out{cfg.output_dir};
  fs::remove(out.temporal());
  try {
    emit_report(m, out, cfg.header());
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("temporal.csv") != std::string::npos);
  }
}

TEST_CASE("config parsing") {
  const auto cfg = load_config(kData / "config.json");
  CHECK(cfg.input.is_absolute());
  CHECK(fs::exists(cfg.input));
  CHECK(cfg.ks == std::vector<std::size_t>{400, 100, 50});
  CHECK_THROWS_AS(config_from_json({{"no_such_key", 1}}), UsageError);

  auto a = fixture_config("hash_a");
  auto b = a;
  b.output_dir = "/elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 7;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(config_from_json(to_json(a))) == config_hash(a));
}

TEST_CASE("missing input is a data error before any stage runs") {
  auto cfg = fixture_config("no_input");
  cfg.input = "/nonexistent/corpus.jsonl";
  try {
    run_pipeline(cfg);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "config");
    CHECK(e.exit_code() == 2);
  }
}
