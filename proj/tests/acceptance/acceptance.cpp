// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// non-zero when any selected criterion fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "defminer/artifacts.hpp"
#include "defminer/clustering.hpp"
#include "defminer/dedup.hpp"
#include "defminer/error.hpp"
#include "defminer/filter.hpp"
#include "defminer/pipeline.hpp"
#include "defminer/sentence.hpp"
#include "defminer/stats.hpp"
#include "defminer/vector_space.hpp"
#include "oracles.hpp"

using namespace defminer;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kData = DEFMINER_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("defminer_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

PipelineConfig config_for(const fs::path& input, const fs::path& out) {
  PipelineConfig c;
  c.input = input;
  c.domain_rules = kData / "domain_rules.json";
  c.filter_rules = kData / "filter_rules.json";
  c.lexicon = kData / "lexicon.json";
  c.output_dir = out;
  return c;
}

/// Median wall time of `reps` calls, in milliseconds.
double median_ms(const std::function<void()>& f, int reps = 11) {
  std::vector<double> t;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    f();
    t.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

DefinitionCandidate cand(std::string doc, std::string sentence) {
  DefinitionCandidate c;
  c.doc_id = std::move(doc);
  c.sentence = std::move(sentence);
  c.span = {0, c.sentence.size()};
  return c;
}

Outcome fuzzy_showcase_pair() {
  const std::string a =
      "Digital Twin is a virtual representation of real-world entities and processes, synchronized at a specified "
      "frequency and fidelity.";
  const std::string b =
      "Digital Twin is a digital replica of real-world entities and processes, synchronized at a specified "
      "frequency and fidelity.";
  Outcome o;
  const double score = fuzzy_match(a, b);
  const auto res = dedup_cluster({cand("glossary2020", a), cand("heritage2023", b)}, 0.90);
  const double ms = median_ms([&] { (void)fuzzy_match(a, b); });
  o.require(score >= 0.88 && score <= 0.96, "score outside [0.88, 0.96]");
  o.require(res.survivors.size() == 1, "pair kept at threshold 0.90");
  o.require(ms < 1.0, "slower than 1 ms");
  o.detail += fmt::format("{}score {:.4f}, {}, {:.4f} ms", o.pass ? "" : "; ", score,
                          res.survivors.size() == 1 ? "dropped" : "kept", ms);
  return o;
}

Outcome cosine() {
  Outcome o;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(16);
    double n = 0;
    for (auto& x : v) {
      x = g(rng);
      n += x * x;
    }
    for (auto& x : v) x /= std::sqrt(n);
    const DefinitionVector d("v", v);
    o.require(cosine_similarity(d, d) == 1.0, "identity is not exactly 1");
  }
  o.require(cosine_similarity(DefinitionVector("x", {1, 0, 0}), DefinitionVector("y", {0, 1, 0})) == 0.0,
            "orthogonal is not 0");
  const double hand = cosine_similarity(DefinitionVector("a", {1, 2, 3}), DefinitionVector("b", {4, 5, 6}));
  o.require(std::abs(hand - 0.974632) <= 1e-6, fmt::format("hand case {:.9f}", hand));
  if (o.pass) o.detail = fmt::format("identity 1, orthogonal 0, hand {:.6f}", hand);
  return o;
}

Outcome chi_square_oracle() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> rows(2, 16), cols(2, 4), count(0, 50);
  double worst_rel = 0, worst_identity = 0;
  for (int trial = 0; trial < 200; ++trial) {
    ContingencyTable t;
    const auto r = static_cast<std::size_t>(rows(rng));
    const auto c = static_cast<std::size_t>(cols(rng));
    t.observed.assign(r, std::vector<double>(c));
    for (auto& row : t.observed)
      for (auto& v : row) v = count(rng);
    for (std::size_t i = 0; i < r; ++i) t.rows.push_back(std::to_string(i));
    for (std::size_t j = 0; j < c; ++j) t.cols.push_back(std::to_string(j));

    const auto res = chi_square(t, Smoothing::add_half_zero_cells);
    auto smoothed = t.observed;
    for (auto& row : smoothed)
      for (auto& v : row)
        if (v == 0) v = 0.5;
    const double want = oracle::chi_square(smoothed);
    worst_rel = std::max(worst_rel, std::abs(res.statistic - want) / want);

    const auto R = residuals(t, res);
    double n = 0;
    for (const auto& row : res.observed)
      for (double v : row) n += v;
    for (std::size_t i = 0; i < r; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < c; ++j) s += R.values[i][j] * std::sqrt(res.expected[i][j]);
      worst_identity = std::max(worst_identity, std::abs(s) / n);
    }
  }
  o.require(worst_rel <= 1e-9, fmt::format("statistic relative error {:.3g}", worst_rel));
  o.require(worst_identity <= 1e-9, fmt::format("row identity error {:.3g} N", worst_identity));
  if (o.pass) o.detail = fmt::format("200 tables, max rel err {:.2g}, max identity {:.2g} N", worst_rel, worst_identity);
  return o;
}

Outcome p_value() {
  Outcome o;
  const double p = chi_square_sf(109.76, 45);
  const double ms = median_ms([] { (void)chi_square_sf(109.76, 45); });
  o.require(p >= 1.9e-7 && p <= 3.1e-7, fmt::format("p = {:.4g}", p));
  o.require(ms < 1.0, fmt::format("runtime {:.3f} ms", ms));
  if (o.pass) o.detail = fmt::format("p = {:.4g}, {:.4f} ms", p, ms);
  return o;
}

/// Runs the pipeline once on the calibration corpus and caches the output dir.
const fs::path& calibration_run() {
  static const fs::path dir = [] {
    const auto d = scratch("calibration");
    run_pipeline(config_for(kData / "calibration" / "corpus.jsonl", d));
    return d;
  }();
  return dir;
}

Outcome residual_signs() {
  Outcome o;
  const Layout out{calibration_run()};
  const auto csv = read_csv(out.residuals());
  const auto& head = csv.front();
  auto col = [&](const std::string& d) {
    return static_cast<std::size_t>(std::find(head.begin(), head.end(), d) - head.begin());
  };
  auto value = [&](const std::string& comp, const std::string& dom) {
    for (std::size_t i = 1; i < csv.size(); ++i)
      if (csv[i][0] == comp) return std::stod(csv[i].at(col(dom)));
    throw DataError("no residual row " + comp);
  };
  const std::vector<std::pair<std::string, std::string>> positive = {{"2D/3D data", "building"},
                                                                     {"2D/3D data", "architecture"},
                                                                     {"IoT and sensor network", "urban"},
                                                                     {"Policy", "urban"}};
  const std::vector<std::pair<std::string, std::string>> negative = {{"Simulation models", "urban"},
                                                                     {"Data analytics and AI/ML models", "urban"},
                                                                     {"Real-time data", "architecture"}};
  for (const auto& [c, d] : positive) {
    const double v = value(c, d);
    o.require(v > 0, fmt::format("({}, {}) = {:.3f}, expected > 0", c, d, v));
  }
  for (const auto& [c, d] : negative) {
    const double v = value(c, d);
    o.require(v < 0, fmt::format("({}, {}) = {:.3f}, expected < 0", c, d, v));
  }
  const std::map<std::string, std::string> top = {{"building", "2D/3D data"},
                                                  {"architecture", "2D/3D data"},
                                                  {"urban", "Policy"},
                                                  {"manufacturing", "Simulation models"}};
  for (const auto& [d, want] : top) {
    std::string best;
    double bv = -1e300;
    for (std::size_t i = 1; i < csv.size(); ++i) {
      const double v = std::stod(csv[i].at(col(d)));
      if (v > bv) {
        bv = v;
        best = csv[i][0];
      }
    }
    o.require(best == want, fmt::format("top-1 in {} is {}, expected {}", d, best, want));
  }
  if (o.pass) {
    o.detail = fmt::format("7 signs hold; top-1 building/architecture 2D/3D data, urban Policy, manufacturing "
                           "Simulation models; (Policy, urban) = {:.2f}",
                           value("Policy", "urban"));
  }
  return o;
}

Outcome hprt_ltds_partition() {
  Outcome o;
  const auto g = read_json(Layout{calibration_run()}.groups());
  const std::set<std::string> hprt_want = {"Cloud platform and architecture", "HPC", "Security protocols",
                                           "Real-time data", "Simulation models",
                                           "Data analytics and AI/ML models"};
  const std::set<std::string> ltds_want = {"Data modeling", "Data validation", "Visualization", "Policy"};
  if (g.at("status") != "ok" || g.at("groups").size() != 2) {
    o.require(false, "stats did not produce two groups");
    return o;
  }
  std::set<std::string> hprt, ltds;
  for (const auto& grp : g.at("groups")) {
    auto& dst = grp.at("name") == "HPRT" ? hprt : ltds;
    for (const auto& m : grp.at("members")) dst.insert(m.get<std::string>());
  }
  for (const auto& c : hprt_want) o.require(hprt.count(c) == 1, c + " not in HPRT");
  for (const auto& c : ltds_want) o.require(hprt.count(c) == 0, c + " in HPRT");
  if (o.pass) o.detail = fmt::format("HPRT {} members, LTDS {} members", hprt.size(), ltds.size());
  return o;
}

Outcome kmeans_oracle() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> nd(4, 12), kd(2, 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int optimal = 0, monotone = 0;
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(nd(rng));
    const auto k = static_cast<std::size_t>(kd(rng));
    std::vector<DefinitionVector> pts;
    std::vector<std::vector<double>> raw;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> v = {u(rng), u(rng)};
      raw.push_back(v);
      pts.emplace_back(fmt::format("p{:02}", i), v);
    }
    const auto r = kmeans(pts, {.k = k, .seed = 42});
    const double best = oracle::best_partition_inertia(raw, k);
    if (r.inertia <= best * (1 + 1e-9) + 1e-12) ++optimal;
    worst = std::max(worst, best > 0 ? r.inertia / best - 1.0 : 0.0);
    bool mono = true;
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i)
      mono = mono && r.inertia_history[i] <= r.inertia_history[i - 1] * (1 + 1e-12);
    monotone += mono ? 1 : 0;
  }
  o.require(optimal >= 45, "fewer than 45/50 optimal");
  o.require(worst <= 0.05, "an instance exceeds the optimum by more than 5%");
  o.require(monotone == 50, "inertia increased during a run");
  o.detail += fmt::format("{}optimal {}/50, worst excess {:.2f}%, monotone {}/50", o.pass ? "" : "; ", optimal,
                          100 * worst, monotone);
  return o;
}

Outcome levenshtein_oracle() {
  Outcome o;
  std::vector<std::u32string> words = {U""};
  for (std::size_t len = 1; len <= 6; ++len) {
    const std::size_t start = words.size();
    for (std::size_t i = 0; i < start; ++i) {
      if (words[i].size() != len - 1) continue;
      for (char32_t c : {U'a', U'b', U'c'}) words.push_back(words[i] + c);
    }
  }
  std::size_t mismatches = 0, pairs = 0;
  for (const auto& a : words) {
    for (const auto& b : words) {
      ++pairs;
      if (levenshtein(a, b) != oracle::levenshtein(a, b)) ++mismatches;
    }
  }
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::size_t violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto& x = words[pick(rng)];
    const auto& y = words[pick(rng)];
    const auto& z = words[pick(rng)];
    if (levenshtein(x, z) > levenshtein(x, y) + levenshtein(y, z)) ++violations;
  }
  o.require(mismatches == 0, fmt::format("{} mismatches of {} pairs", mismatches, pairs));
  o.require(violations == 0, fmt::format("{} triangle violations", violations));
  if (o.pass) o.detail = fmt::format("{} strings, {} pairs exact, 1000 triples ok", words.size(), pairs);
  return o;
}

Outcome extraction_fidelity() {
  Outcome o;
  const PatternTemplate tmpl;
  std::size_t golden = 0;
  for (const auto& line : read_jsonl(kData / "golden" / "extraction.jsonl")) {
    ++golden;
    const auto s = line.at("sentence").get<std::string>();
    const auto m = tmpl.match(s);
    const bool want = line.at("candidate").get<bool>();
    if (m.has_value() != want) {
      o.require(false, fmt::format("'{}' candidate={}", s, m.has_value()));
    } else if (want && m->marker != line.at("marker").get<std::string>()) {
      o.require(false, fmt::format("'{}' marker '{}'", s, m->marker));
    }
  }
  o.require(golden == 20, fmt::format("golden file has {} lines", golden));

  FilterRules rules = load_filter_rules(kData / "filter_rules.json");
  const std::vector<std::string> id_examples = {
      "Digital twin is a revolution in the digital industry.",
      "Digital twin is a new paradigm in simulation.",
      "digital twin is defined as a digital representation of assets, processes, or systems.",
      "digital twin is a living model that drives a business outcome."};
  for (const auto& s : id_examples) {
    const auto v = heuristic_filter(cand("id", s), rules);
    o.require(v.label == Completeness::incomplete, "kept: " + s);
  }

  const std::set<std::string> table_docs = {"tbl_sim2010", "tbl_soft2013", "tbl_dyn2015",  "tbl_info2017",
                                            "tbl_art2018", "tbl_live2019", "tbl_rep2021",  "tbl_det2021",
                                            "tbl_city2022", "tbl_rt2024"};
  const auto corpus = load_corpus(kData / "fixture" / "corpus.jsonl");
  std::size_t kept = 0;
  for (const auto& c : extract_all(corpus.documents(), tmpl)) {
    if (!table_docs.count(c.doc_id)) continue;
    if (heuristic_filter(c, rules).label == Completeness::complete) {
      ++kept;
    } else {
      o.require(false, "dropped table definition from " + c.doc_id);
    }
  }
  o.require(kept == 10, fmt::format("{} of 10 table definitions kept", kept));
  if (o.pass) o.detail = "20 golden sentences exact, 4 incomplete examples filtered, 10/10 table definitions kept";
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto a = scratch("det_a"), b = scratch("det_b");
  const auto input = kData / "fixture" / "corpus.jsonl";
  const auto t0 = Clock::now();
  run_pipeline(config_for(input, a));
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  run_pipeline(config_for(input, b));

  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), a);
    if (rel == "run_manifest.json") continue;
    ++files;
    if (!fs::exists(b / rel)) {
      o.require(false, rel.string() + " missing in second run");
    } else if (strip_header(e.path()) != strip_header(b / rel)) {
      o.require(false, rel.string() + " differs");
    }
  }
  o.require(files > 20, fmt::format("only {} artifacts", files));
  o.require(secs < 30.0, fmt::format("pipeline took {:.1f} s", secs));
  if (o.pass) o.detail = fmt::format("{} artifacts identical, run {:.2f} s", files, secs);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*check)();
};

const Criterion kCriteria[] = {
    {1, "fuzzy_showcase_pair", fuzzy_showcase_pair}, {2, "cosine", cosine},
    {3, "chi_square_oracle", chi_square_oracle},     {4, "p_value", p_value},
    {5, "residual_signs", residual_signs},           {6, "hprt_ltds_partition", hprt_ltds_partition},
    {7, "kmeans_oracle", kmeans_oracle},             {8, "levenshtein_oracle", levenshtein_oracle},
    {9, "extraction_fidelity", extraction_fidelity}, {10, "determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"defminer acceptance checks"};
  std::string which;
  app.add_option("--criterion", which, "Run a single criterion (1-10)");
  CLI11_PARSE(app, argc, argv);
  const int only = which.empty() ? 0 : std::stoi(which);

  spdlog::set_level(spdlog::level::warn);
  bool all_pass = true;
  for (const auto& c : kCriteria) {
    if (only && c.id != only) continue;
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all_pass = all_pass && o.pass;
    std::cout << fmt::format("{} {:02} {}: {}", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail) << std::endl;
  }
  return all_pass ? 0 : 1;
}
