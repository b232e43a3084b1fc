#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "defminer/artifacts.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kBin = DEFMINER_BIN;
const std::string kData = DEFMINER_DATA_DIR;

int run(const std::string& args) {
  const int rc = std::system((kBin + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string out_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("defminer_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  return d.string();
}

std::string fixture_args() {
  return " --input " + kData + "/fixture/corpus.jsonl --domain-rules " + kData + "/domain_rules.json --rules " +
         kData + "/filter_rules.json --lexicon " + kData + "/lexicon.json";
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run("") == 1);
  CHECK(run("run --no-such-flag") == 1);
  CHECK(run("run" + fixture_args() + " --output-dir " + out_dir("ks") + " --ks 10,20") == 1);
  CHECK(run("run" + fixture_args() + " --output-dir " + out_dir("ks2") + " --ks ten") == 1);
  CHECK(run("--help") == 0);
}

TEST_CASE("run succeeds on the fixture") {
  const auto d = out_dir("ok");
  CHECK(run("run" + fixture_args() + " --output-dir " + d) == 0);
  CHECK(fs::exists(fs::path(d) / "09_report" / "digest.txt"));
  CHECK(run("report --dir " + d) == 0);
}

TEST_CASE("run from the shipped config file") {
  const auto d = out_dir("config");
  CHECK(run("run --config " + kData + "/config.json --output-dir " + d) == 0);
}

TEST_CASE("data errors exit 2") {
  CHECK(run("run" + std::string(" --input /nonexistent.jsonl --domain-rules ") + kData +
            "/domain_rules.json --rules " + kData + "/filter_rules.json --lexicon " + kData +
            "/lexicon.json --output-dir " + out_dir("missing")) == 2);
  CHECK(run("report --dir " + out_dir("nothing")) == 2);
}

TEST_CASE("endpoint failure without fallback exits 3") {
  CHECK(run("run" + fixture_args() + " --output-dir " + out_dir("ep") +
            " --endpoint http://127.0.0.1:9/ --no-fallback") == 3);
}

TEST_CASE("single stages chain together") {
  const auto d = out_dir("stages");
  fs::create_directories(d);
  CHECK(run("ingest --input " + kData + "/fixture/corpus.jsonl --domain-rules " + kData +
            "/domain_rules.json --out " + d + "/corpus.jsonl") == 0);
  CHECK(run("extract --corpus " + d + "/corpus.jsonl --out " + d + "/cands.jsonl") == 0);
  CHECK(run("filter --candidates " + d + "/cands.jsonl --rules " + kData + "/filter_rules.json --out-dir " + d) ==
        0);
  CHECK(run("embed --candidates " + d + "/03_filtered/kept.jsonl --out " + d + "/vectors.jsonl") == 0);
  CHECK(run("cluster --vectors " + d + "/vectors.jsonl --ks 8,4 --no-scale --out " + d + "/assign.jsonl") == 0);
  CHECK(run("dedup --candidates " + d + "/03_filtered/kept.jsonl --assignment " + d + "/assign.jsonl --out-dir " +
            d) == 0);
  CHECK(run("components --definitions " + d + "/06_definitions/definitions.jsonl --lexicon " + kData +
            "/lexicon.json --survey " + d + "/corpus.jsonl --out-dir " + d) == 0);
  CHECK(run("stats --contingency " + d + "/07_components/contingency.csv --out-dir " + d) == 0);
  CHECK(run("stats --contingency " + d + "/07_components/contingency.csv --smoothing sometimes --out-dir " + d) ==
        1);
  CHECK(fs::exists(fs::path(d) / "08_stats" / "groups.json"));
}
