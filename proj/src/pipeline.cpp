#include "defminer/pipeline.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <set>

#include "defminer/error.hpp"

namespace defminer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view to_string(RestageMode m) { return m == RestageMode::raw ? "raw" : "centroids"; }
std::string_view to_string(FuzzyMode m) { return m == FuzzyMode::raw ? "raw" : "normalized"; }
std::string_view to_string(Smoothing s) { return s == Smoothing::none ? "none" : "add_half_zero_cells"; }
std::string_view to_string(ResidualKind k) { return k == ResidualKind::adjusted ? "adjusted" : "pearson"; }

std::string_view scope_suffix(FrequencyScope s) { return s == FrequencyScope::survey ? "_survey" : ""; }

fs::path resolve(const json& j, const char* key, const fs::path& base) {
  fs::path p = j.at(key).get<std::string>();
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

json pattern_to_json(const PatternTemplate::Options& o) {
  return {{"term", o.term},
          {"plural", o.plural},
          {"copulas", o.copulas},
          {"markers", o.markers},
          {"extra_patterns", o.extra_patterns}};
}

std::string now_iso() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                     std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

int exit_code_of(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return 1;
  if (dynamic_cast<const EndpointError*>(&e)) return 3;
  return 2;
}

std::vector<std::size_t> final_labels(const std::vector<DefinitionCandidate>& cands,
                                      const std::map<std::string, std::size_t>& assignment) {
  std::vector<std::size_t> out;
  out.reserve(cands.size());
  for (const auto& c : cands) {
    auto it = assignment.find(c.id());
    if (it == assignment.end()) throw DataError("candidate " + c.id() + " has no cluster assignment");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

KMeansOptions PipelineConfig::kmeans_options() const {
  return {.k = ks.empty() ? 1 : ks.front(), .seed = seed, .max_iter = max_iter, .tol = tol, .n_init = n_init};
}

ArtifactHeader PipelineConfig::header() const { return {config_hash(*this), seed}; }

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
  static const std::set<std::string> known = {
      "input",       "domain_rules", "filter_rules", "lexicon",     "pattern",
      "classifier",  "embedding",    "ks",           "scale_ks",    "reference_n",
      "restage",     "max_iter",     "tol",          "n_init",      "dedup_threshold",
      "fuzzy_mode",  "smoothing",    "residuals",    "groups",      "ngram_sizes",
      "seed",        "output_dir"};
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw UsageError("unknown config key '" + key + "'");
  }

  PipelineConfig c;
  try {
    c.input = resolve(j, "input", base_dir);
    c.domain_rules = resolve(j, "domain_rules", base_dir);
    c.filter_rules = resolve(j, "filter_rules", base_dir);
    c.lexicon = resolve(j, "lexicon", base_dir);
    if (j.contains("pattern")) c.pattern = pattern_options_from_json(j["pattern"]);
    if (j.contains("classifier")) {
      const auto& e = j["classifier"];
      c.classifier.url = e.value("url", std::string{});
      c.classifier.enabled = e.value("enabled", false);
      c.classifier.allow_fallback = e.value("allow_fallback", true);
      c.classifier.timeout = std::chrono::milliseconds(e.value("timeout_ms", 10000));
      c.classifier.max_in_flight = e.value("max_in_flight", std::size_t{4});
      if (e.contains("prompt_template")) c.classifier.prompt_template = e["prompt_template"].get<std::string>();
    }
    if (j.contains("embedding")) {
      const auto& e = j["embedding"];
      const auto mode = e.value("mode", std::string("baseline"));
      if (mode != "baseline" && mode != "external") {
        throw UsageError("embedding mode must be baseline or external, got '" + mode + "'");
      }
      c.embedding.enabled = mode == "external";
      c.embedding.url = e.value("url", std::string{});
      c.embedding.allow_fallback = e.value("allow_fallback", true);
      c.embedding.timeout = std::chrono::milliseconds(e.value("timeout_ms", 10000));
    }
    if (j.contains("ks")) c.ks = j["ks"].get<std::vector<std::size_t>>();
    c.scale_ks = j.value("scale_ks", c.scale_ks);
    c.reference_n = j.value("reference_n", c.reference_n);
    if (j.contains("restage")) {
      const auto s = j["restage"].get<std::string>();
      if (s == "raw") c.restage = RestageMode::raw;
      else if (s == "centroids") c.restage = RestageMode::centroids;
      else throw UsageError("restage must be centroids or raw, got '" + s + "'");
    }
    c.max_iter = j.value("max_iter", c.max_iter);
    c.tol = j.value("tol", c.tol);
    c.n_init = j.value("n_init", c.n_init);
    c.dedup_threshold = j.value("dedup_threshold", c.dedup_threshold);
    if (j.contains("fuzzy_mode")) {
      const auto s = j["fuzzy_mode"].get<std::string>();
      if (s == "raw") c.fuzzy_mode = FuzzyMode::raw;
      else if (s == "normalized") c.fuzzy_mode = FuzzyMode::normalized;
      else throw UsageError("fuzzy_mode must be normalized or raw, got '" + s + "'");
    }
    if (j.contains("smoothing")) {
      const auto s = j["smoothing"].get<std::string>();
      if (s == "none") c.smoothing = Smoothing::none;
      else if (s == "add_half_zero_cells") c.smoothing = Smoothing::add_half_zero_cells;
      else throw UsageError("smoothing must be none or add_half_zero_cells, got '" + s + "'");
    }
    if (j.contains("residuals")) {
      const auto s = j["residuals"].get<std::string>();
      if (s == "adjusted") c.residual_kind = ResidualKind::adjusted;
      else if (s == "pearson") c.residual_kind = ResidualKind::pearson;
      else throw UsageError("residuals must be pearson or adjusted, got '" + s + "'");
    }
    c.groups = j.value("groups", c.groups);
    if (j.contains("ngram_sizes")) c.ngram_sizes = j["ngram_sizes"].get<std::vector<std::size_t>>();
    c.seed = j.value("seed", c.seed);
    if (j.contains("output_dir")) {
      fs::path p = j["output_dir"].get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      c.output_dir = p.lexically_normal();
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed config: ") + e.what());
  }
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("malformed config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, fs::absolute(path).parent_path());
}

json to_json(const PipelineConfig& c) {
  return {{"input", c.input.string()},
          {"domain_rules", c.domain_rules.string()},
          {"filter_rules", c.filter_rules.string()},
          {"lexicon", c.lexicon.string()},
          {"pattern", pattern_to_json(c.pattern)},
          {"classifier",
           {{"url", c.classifier.url},
            {"enabled", c.classifier.enabled},
            {"allow_fallback", c.classifier.allow_fallback},
            {"timeout_ms", c.classifier.timeout.count()},
            {"max_in_flight", c.classifier.max_in_flight},
            {"prompt_template", c.classifier.prompt_template}}},
          {"embedding",
           {{"mode", c.embedding.enabled ? "external" : "baseline"},
            {"url", c.embedding.url},
            {"allow_fallback", c.embedding.allow_fallback},
            {"timeout_ms", c.embedding.timeout.count()}}},
          {"ks", c.ks},
          {"scale_ks", c.scale_ks},
          {"reference_n", c.reference_n},
          {"restage", to_string(c.restage)},
          {"max_iter", c.max_iter},
          {"tol", c.tol},
          {"n_init", c.n_init},
          {"dedup_threshold", c.dedup_threshold},
          {"fuzzy_mode", to_string(c.fuzzy_mode)},
          {"smoothing", to_string(c.smoothing)},
          {"residuals", to_string(c.residual_kind)},
          {"groups", c.groups},
          {"ngram_sizes", c.ngram_sizes},
          {"seed", c.seed},
          {"output_dir", c.output_dir.string()}};
}

std::string config_hash(const PipelineConfig& c) {
  auto j = to_json(c);
  j.erase("output_dir");
  return fnv1a_hex(j.dump());
}

void validate(const PipelineConfig& c) {
  for (const auto& [what, p] : {std::pair{"input", c.input}, std::pair{"domain_rules", c.domain_rules},
                                std::pair{"filter_rules", c.filter_rules}, std::pair{"lexicon", c.lexicon}}) {
    if (!fs::is_regular_file(p)) throw DataError(std::string(what) + " file not found: " + p.string());
  }
  if (c.pattern.term.empty()) throw UsageError("term must not be empty");
  if (c.ks.empty()) throw UsageError("ks must not be empty");
  if (!(c.dedup_threshold > 0.0 && c.dedup_threshold <= 1.0)) {
    throw UsageError("dedup threshold must be in (0, 1]");
  }
  if (c.groups == 0) throw UsageError("groups must be at least 1");
  if (c.max_iter == 0 || c.n_init == 0 || c.reference_n == 0) {
    throw UsageError("max_iter, n_init and reference_n must be positive");
  }
  for (std::size_t n : c.ngram_sizes) {
    if (n < 2 || n > 5) throw UsageError("n-gram size must be in [2, 5], got " + std::to_string(n));
  }
  if (c.classifier.enabled && c.classifier.url.empty()) throw UsageError("classifier enabled without url");
  if (c.embedding.enabled && c.embedding.url.empty()) throw UsageError("external embedding without url");
}

fs::path Layout::freq_unigram(FrequencyScope s) const {
  return root / "07_components" / fmt::format("freq_unigram{}.csv", scope_suffix(s));
}

fs::path Layout::freq_ngram(std::size_t n, FrequencyScope s) const {
  return root / "07_components" / fmt::format("freq_ngram_{}{}.csv", n, scope_suffix(s));
}

json to_json(const RunManifest& m) {
  json stages = json::array();
  for (const auto& s : m.stages) {
    stages.push_back({{"name", s.name},
                      {"inputs", s.inputs},
                      {"outputs", s.outputs},
                      {"wall_ms", s.wall_ms},
                      {"status", s.status}});
  }
  return {{"version", m.version},   {"config_hash", m.config_hash}, {"seed", m.seed},
          {"started_at", m.started_at}, {"finished_at", m.finished_at}, {"stages", stages},
          {"counts", m.counts}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  try {
    m.version = j.at("version").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.started_at = j.value("started_at", std::string{});
    m.finished_at = j.value("finished_at", std::string{});
    for (const auto& s : j.at("stages")) {
      m.stages.push_back({s.at("name").get<std::string>(),
                          s.at("inputs").get<std::map<std::string, std::size_t>>(),
                          s.at("outputs").get<std::map<std::string, std::size_t>>(),
                          s.at("wall_ms").get<double>(), s.at("status").get<std::string>()});
    }
    m.counts = j.at("counts").get<std::map<std::string, std::size_t>>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed run manifest: ") + e.what());
  }
  return m;
}

std::vector<DefinitionCandidate> read_candidates(const fs::path& path) {
  std::vector<DefinitionCandidate> out;
  for (const auto& j : read_jsonl(path)) out.push_back(candidate_from_json(j));
  return out;
}

void write_candidates(const fs::path& path, const ArtifactHeader& h,
                      const std::vector<DefinitionCandidate>& cands) {
  std::vector<json> rows;
  rows.reserve(cands.size());
  for (const auto& c : cands) rows.push_back(to_json(c));
  write_jsonl(path, h, rows);
}

std::vector<DefinitionVector> read_vectors(const fs::path& path) {
  std::vector<DefinitionVector> out;
  for (const auto& j : read_jsonl(path)) out.push_back(vector_from_json(j));
  return out;
}

void write_vectors(const fs::path& path, const ArtifactHeader& h,
                   const std::vector<DefinitionVector>& vectors) {
  std::vector<json> rows;
  rows.reserve(vectors.size());
  for (const auto& v : vectors) rows.push_back(to_json(v));
  write_jsonl(path, h, rows);
}

std::map<std::string, std::size_t> read_final_assignment(const fs::path& path) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> best;  // id -> (stage, cluster)
  for (const auto& j : read_jsonl(path)) {
    try {
      const auto id = j.at("candidate_id").get<std::string>();
      const auto stage = j.at("stage").get<std::size_t>();
      const auto cluster = j.at("cluster").get<std::size_t>();
      auto it = best.find(id);
      if (it == best.end() || stage > it->second.first) best[id] = {stage, cluster};
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": malformed assignment: " + e.what());
    }
  }
  std::map<std::string, std::size_t> out;
  for (const auto& [id, sc] : best) out[id] = sc.second;
  return out;
}

void write_assignments(const fs::path& path, const ArtifactHeader& h,
                       const std::vector<CascadeStage>& stages) {
  std::vector<json> rows;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    for (const auto& [id, cluster] : stages[s].mapping) {
      rows.push_back({{"candidate_id", id}, {"stage", s}, {"cluster", cluster}});
    }
  }
  write_jsonl(path, h, rows);
}

std::vector<DefinitionRecord> read_records(const fs::path& path) {
  std::vector<DefinitionRecord> out;
  for (const auto& j : read_jsonl(path)) out.push_back(record_from_json(j));
  return out;
}

void write_records(const fs::path& path, const ArtifactHeader& h,
                   const std::vector<DefinitionRecord>& records) {
  std::vector<json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  write_jsonl(path, h, rows);
}

void write_dedup_decisions(const fs::path& path, const ArtifactHeader& h,
                           const std::vector<DedupDecision>& decisions) {
  std::vector<CsvRow> rows{{"kept_id", "dropped_id", "score", "cluster"}};
  for (const auto& d : decisions) {
    rows.push_back({d.kept_id, d.dropped_id, format_real(d.score), std::to_string(d.cluster)});
  }
  write_csv(path, h, rows);
}

void write_frequency(const fs::path& path, const ArtifactHeader& h, const FrequencyTable& t) {
  std::vector<CsvRow> rows{{"term", "count"}};
  for (const auto& r : t.rows) rows.push_back({r.term, std::to_string(r.count)});
  write_csv(path, h, rows);
}

void write_temporal(const fs::path& path, const ArtifactHeader& h, const TemporalSeries& s) {
  std::vector<CsvRow> rows{{"component", "year", "count"}};
  for (std::size_t c = 0; c < s.components.size(); ++c) {
    for (int y = kSeriesFirstYear; y <= kSeriesLastYear; ++y) {
      rows.push_back({s.components[c], std::to_string(y), std::to_string(s.at(c, y))});
    }
  }
  write_csv(path, h, rows);
}

void write_contingency(const fs::path& path, const ArtifactHeader& h, const ContingencyTable& t) {
  std::vector<CsvRow> rows;
  CsvRow head{"component"};
  head.insert(head.end(), t.cols.begin(), t.cols.end());
  rows.push_back(std::move(head));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CsvRow row{t.rows[i]};
    for (double v : t.observed[i]) row.push_back(format_real(v));
    rows.push_back(std::move(row));
  }
  write_csv(path, h, rows);
}

ContingencyTable read_contingency(const fs::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front().size() < 2) throw DataError(path.string() + ": contingency header missing");
  ContingencyTable t;
  t.cols.assign(rows.front().begin() + 1, rows.front().end());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw DataError(path.string() + ": row " + std::to_string(i) + " has " +
                      std::to_string(rows[i].size()) + " fields, expected " +
                      std::to_string(rows.front().size()));
    }
    t.rows.push_back(rows[i][0]);
    std::vector<double> values;
    for (std::size_t j = 1; j < rows[i].size(); ++j) {
      try {
        values.push_back(std::stod(rows[i][j]));
      } catch (const std::exception&) {
        throw DataError(path.string() + ": non-numeric count '" + rows[i][j] + "'");
      }
    }
    t.observed.push_back(std::move(values));
  }
  return t;
}

std::vector<DefinitionRecord> to_records(const std::vector<DefinitionCandidate>& survivors) {
  std::vector<DefinitionRecord> out;
  out.reserve(survivors.size());
  for (const auto& c : survivors) out.push_back({c.id(), c.doc_id, c.sentence, c.year, c.domain, {}});
  return out;
}

ComponentsOutcome components_stage(std::vector<DefinitionRecord> records,
                                   const std::vector<std::string>& survey_sentences,
                                   const ComponentLexicon& lex,
                                   const std::vector<std::size_t>& ngram_sizes, const Layout& out,
                                   const ArtifactHeader& h) {
  ComponentsOutcome res;
  std::vector<std::string> sentences;
  for (auto& r : records) {
    r.components = tag_components(r.sentence, lex);
    sentences.push_back(r.sentence);
  }
  write_records(out.tagged(), h, records);

  const std::vector<std::string>* sentences_ptr = &sentences;
  for (auto [scope, texts] : {std::pair{FrequencyScope::definitions, sentences_ptr},
                              std::pair{FrequencyScope::survey, &survey_sentences}}) {
    write_frequency(out.freq_unigram(scope), h, term_frequencies(*texts, scope));
    for (std::size_t n : ngram_sizes) {
      write_frequency(out.freq_ngram(n, scope), h, ngram_frequencies(*texts, n, scope));
    }
  }
  write_temporal(out.temporal(), h, temporal_series(records, lex));

  if (!records.empty()) {
    auto built = contingency(records, lex);
    write_contingency(out.contingency(), h, built.table);
    res.contingency_written = true;
    res.excluded_other = built.excluded_other;
  }
  res.tagged = std::move(records);
  return res;
}

StatsOutcome stats_stage(const ContingencyTable* table, const std::string& skip_reason,
                         Smoothing smoothing, ResidualKind kind, std::size_t groups,
                         const Layout& out, const ArtifactHeader& h) {
  StatsOutcome res;
  if (table == nullptr) {
    res.skipped = true;
    res.reason = skip_reason;
    const json skipped{{"status", "skipped"}, {"reason", skip_reason}};
    write_json(out.chisq(), h, skipped);
    write_json(out.groups(), h, skipped);
    write_csv(out.residuals(), h, {{"component"}});
    write_csv(out.residual_corr(), h, {{"component"}});
    write_csv(out.linkage(), h, {{"left", "right", "distance", "size"}});
    return res;
  }

  const auto chi = chi_square(*table, smoothing);
  json adjusted = json::array();
  for (const auto& c : chi.adjusted_cells) {
    adjusted.push_back({{"component", table->rows[c.row]}, {"domain", table->cols[c.col]}});
  }
  write_json(out.chisq(), h,
             {{"status", "ok"},
              {"statistic", chi.statistic},
              {"dof", chi.dof},
              {"p_value", chi.p_value},
              {"smoothing", to_string(smoothing)},
              {"smoothed_cells", adjusted}});

  const auto res_m = residuals(*table, chi, kind);
  std::vector<CsvRow> rrows;
  CsvRow head{"component"};
  head.insert(head.end(), res_m.cols.begin(), res_m.cols.end());
  rrows.push_back(head);
  for (std::size_t i = 0; i < res_m.rows.size(); ++i) {
    CsvRow row{res_m.rows[i]};
    for (std::size_t j = 0; j < res_m.cols.size(); ++j) {
      row.push_back(format_real(res_m.values[i][j]));
      if (res_m.significant[i][j]) ++res.significant_cells;
    }
    rrows.push_back(std::move(row));
  }
  write_csv(out.residuals(), h, rrows);

  const auto corr = residual_correlation(res_m);
  std::vector<CsvRow> crows;
  CsvRow chead{"component"};
  chead.insert(chead.end(), corr.labels.begin(), corr.labels.end());
  crows.push_back(chead);
  for (std::size_t i = 0; i < corr.labels.size(); ++i) {
    CsvRow row{corr.labels[i]};
    for (double v : corr.values[i]) row.push_back(format_real(v));
    crows.push_back(std::move(row));
  }
  write_csv(out.residual_corr(), h, crows);

  const auto part = partition_components(corr, std::min(groups, corr.labels.size()));
  std::vector<CsvRow> lrows{{"left", "right", "distance", "size"}};
  for (const auto& m : part.tree.merges) {
    lrows.push_back({std::to_string(m.left), std::to_string(m.right), format_real(m.distance),
                     std::to_string(m.size)});
  }
  write_csv(out.linkage(), h, lrows);

  json gj = json::array();
  for (std::size_t g = 0; g < part.groups.size(); ++g) {
    gj.push_back({{"name", part.names[g]}, {"members", part.groups[g]}});
  }
  json zero_var = json::array();
  for (std::size_t i = 0; i < corr.labels.size(); ++i) {
    if (corr.zero_variance[i]) zero_var.push_back(corr.labels[i]);
  }
  write_json(out.groups(), h, {{"status", "ok"}, {"groups", gj}, {"zero_variance", zero_var}});
  return res;
}

namespace {

json top_terms(const fs::path& path, std::size_t n) {
  const auto rows = read_csv(path);
  json out = json::array();
  for (std::size_t i = 1; i < rows.size() && out.size() < n; ++i) {
    if (rows[i].size() < 2) throw DataError(path.string() + ": malformed frequency row");
    out.push_back({{"term", rows[i][0]}, {"count", std::stoull(rows[i][1])}});
  }
  return out;
}

json matrix_csv(const fs::path& path) {
  const auto rows = read_csv(path);
  json out{{"rows", json::array()}, {"cols", json::array()}, {"values", json::array()}};
  if (rows.empty()) return out;
  for (std::size_t j = 1; j < rows.front().size(); ++j) out["cols"].push_back(rows.front()[j]);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    out["rows"].push_back(rows[i][0]);
    json vals = json::array();
    for (std::size_t j = 1; j < rows[i].size(); ++j) vals.push_back(std::stod(rows[i][j]));
    out["values"].push_back(vals);
  }
  return out;
}

json temporal_json(const fs::path& path) {
  const auto rows = read_csv(path);
  json series = json::object();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 3) throw DataError(path.string() + ": malformed temporal row");
    series[rows[i][0]][rows[i][1]] = std::stoull(rows[i][2]);
  }
  return series;
}

void require(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw DataError("missing artifact " + p.string());
}

}  // namespace

void emit_report(const RunManifest& manifest, const Layout& out, const ArtifactHeader& h) {
  const std::vector<fs::path> needed = {
      out.freq_unigram(FrequencyScope::definitions), out.freq_unigram(FrequencyScope::survey),
      out.freq_ngram(2, FrequencyScope::definitions), out.freq_ngram(2, FrequencyScope::survey),
      out.temporal(), out.chisq(), out.residuals(), out.groups()};
  for (const auto& p : needed) require(p);

  static const char* funnel_keys[] = {"documents", "candidates", "kept", "clusters", "survivors", "tagged"};
  json funnel = json::object();
  for (const char* k : funnel_keys) {
    auto it = manifest.counts.find(k);
    funnel[k] = it == manifest.counts.end() ? 0 : it->second;
  }

  json report;
  report["funnel"] = funnel;
  for (auto scope : {FrequencyScope::definitions, FrequencyScope::survey}) {
    const std::string name = scope == FrequencyScope::survey ? "survey" : "definitions";
    report["top_terms"][name]["unigrams"] = top_terms(out.freq_unigram(scope), 20);
    report["top_terms"][name]["bigrams"] = top_terms(out.freq_ngram(2, scope), 20);
  }
  report["temporal"] = temporal_json(out.temporal());
  const auto chisq = read_json(out.chisq());
  report["chi_square"] = chisq;
  const bool skipped = chisq.value("status", std::string("ok")) == "skipped";
  report["residual_heatmap"] = matrix_csv(out.residuals());
  report["groups"] = read_json(out.groups());
  write_json(out.report(), h, report);

  std::string d;
  d += "defminer report\n\nFunnel\n";
  for (const char* k : funnel_keys) d += fmt::format("  {:<11} {}\n", k, funnel[k].get<std::size_t>());
  if (manifest.counts.count("survivors") && manifest.counts.at("survivors") == 0) {
    d += "\nno definitions survived\n";
  }
  for (auto scope : {"definitions", "survey"}) {
    for (auto kind : {"unigrams", "bigrams"}) {
      d += fmt::format("\nTop {} ({})\n", kind, scope);
      const auto& list = report["top_terms"][scope][kind];
      if (list.empty()) d += "  (none)\n";
      for (const auto& e : list) {
        d += fmt::format("  {:<40} {}\n", e["term"].get<std::string>(), e["count"].get<std::size_t>());
      }
    }
  }
  d += "\nChi-square\n";
  if (skipped) {
    d += "  skipped: " + chisq.value("reason", std::string{}) + "\n";
  } else {
    d += fmt::format("  statistic {} dof {} p {}\n", format_real(chisq["statistic"].get<double>()),
                     chisq["dof"].get<std::size_t>(), format_real(chisq["p_value"].get<double>()));
    const auto& hm = report["residual_heatmap"];
    d += "\nSignificant residuals (|R| > 2)\n";
    for (std::size_t i = 0; i < hm["rows"].size(); ++i) {
      for (std::size_t j = 0; j < hm["cols"].size(); ++j) {
        const double v = hm["values"][i][j].get<double>();
        if (std::abs(v) > kSignificanceThreshold) {
          d += fmt::format("  {:<32} {:<14} {:+.2f}\n", hm["rows"][i].get<std::string>(),
                           hm["cols"][j].get<std::string>(), v);
        }
      }
    }
    d += "\nComponent groups\n";
    for (const auto& g : report["groups"]["groups"]) {
      std::string members;
      for (const auto& m : g["members"]) {
        if (!members.empty()) members += ", ";
        members += m.get<std::string>();
      }
      d += fmt::format("  {}: {}\n", g["name"].get<std::string>(), members);
    }
  }
  write_text(out.digest(), h, d);
}

namespace {

class StageRunner {
 public:
  explicit StageRunner(RunManifest& m) : m_(m) {}

  /// Runs `body`, timing it and appending its record. Any failure is
  /// rethrown as StageError carrying the stage name.
  void run(const std::string& name, const std::function<void(StageRecord&)>& body) {
    StageRecord rec;
    rec.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(rec);
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      spdlog::error("stage {} failed: {}", name, e.what());
      throw StageError(name, e.what(), exit_code_of(e));
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    spdlog::info("stage {} done in {:.1f} ms", name, rec.wall_ms);
    m_.stages.push_back(std::move(rec));
  }

 private:
  RunManifest& m_;
};

}  // namespace

RunManifest run_pipeline(const PipelineConfig& cfg) {
  RunManifest m;
  m.config_hash = config_hash(cfg);
  m.seed = cfg.seed;
  m.started_at = now_iso();
  const ArtifactHeader h = cfg.header();
  const Layout out{cfg.output_dir};
  StageRunner stages(m);

  try {
    validate(cfg);
  } catch (const std::exception& e) {
    throw StageError("config", e.what(), exit_code_of(e));
  }
  fs::create_directories(out.root);

  Corpus corpus;
  stages.run("ingest", [&](StageRecord& r) {
    corpus = apply_domain_rules(load_corpus(cfg.input), load_domain_rules(cfg.domain_rules));
    std::vector<json> docs;
    for (const auto& d : corpus.documents()) docs.push_back(to_json(d));
    write_jsonl(out.corpus(), h, docs);
    const auto& man = corpus.manifest();
    write_json(out.corpus_manifest(), h,
               {{"documents", corpus.size()},
                {"per_source", man.per_source},
                {"per_domain", man.per_domain},
                {"per_year", man.per_year}});
    r.outputs["documents"] = corpus.size();
    m.counts["documents"] = corpus.size();
  });

  const PatternTemplate tmpl(cfg.pattern);
  std::vector<DefinitionCandidate> candidates;
  stages.run("extract", [&](StageRecord& r) {
    const auto articles = corpus.with_source(Source::article);
    const auto raw = extract_all(articles, tmpl);
    candidates = dedup_exact(raw);
    write_candidates(out.candidates(), h, candidates);
    std::map<std::string, std::size_t> markers;
    for (const auto& c : candidates) ++markers[c.marker.empty() ? "(bare)" : c.marker];
    write_json(out.extraction(), h,
               {{"articles", articles.size()},
                {"raw_candidates", raw.size()},
                {"exact_duplicates", raw.size() - candidates.size()},
                {"candidates", candidates.size()},
                {"per_marker", markers},
                {"patterns", tmpl.compiled()}});
    r.inputs["articles"] = articles.size();
    r.outputs["raw_candidates"] = raw.size();
    r.outputs["candidates"] = candidates.size();
    m.counts["candidates_raw"] = raw.size();
    m.counts["candidates"] = candidates.size();
  });

  std::vector<DefinitionCandidate> kept;
  stages.run("filter", [&](StageRecord& r) {
    FilterRules rules = load_filter_rules(cfg.filter_rules);
    rules.pattern = tmpl;
    const auto verdicts = classify_all(candidates, cfg.classifier, rules);
    auto outcome = apply_filter(candidates, verdicts);
    std::vector<json> vj;
    for (const auto& v : verdicts) vj.push_back(to_json(v));
    write_jsonl(out.verdicts(), h, vj);
    write_candidates(out.kept(), h, outcome.kept);
    write_candidates(out.dropped(), h, outcome.dropped);
    write_json(out.audit(), h, {{"rules", outcome.audit}});
    kept = std::move(outcome.kept);
    r.inputs["candidates"] = candidates.size();
    r.outputs["kept"] = kept.size();
    r.outputs["dropped"] = outcome.dropped.size();
    m.counts["kept"] = kept.size();
    m.counts["dropped"] = outcome.dropped.size();
  });

  std::vector<DefinitionVector> vectors;
  stages.run("embed", [&](StageRecord& r) {
    r.inputs["kept"] = kept.size();
    if (!kept.empty()) {
      std::vector<IdentifiedText> items;
      for (const auto& c : kept) items.push_back({c.id(), c.sentence});
      vectors = cfg.embedding.enabled ? embed_external(items, cfg.embedding) : embed_baseline(items);
    } else {
      r.status = "skipped";
    }
    write_vectors(out.vectors(), h, vectors);
    r.outputs["vectors"] = vectors.size();
    m.counts["vectors"] = vectors.size();
  });

  std::map<std::string, std::size_t> final_cluster;
  stages.run("cluster", [&](StageRecord& r) {
    r.inputs["vectors"] = vectors.size();
    // scale_ks also rejects a schedule that is not strictly decreasing.
    const auto scaled = scale_ks(cfg.ks, vectors.size(), cfg.reference_n);
    const auto ks = cfg.scale_ks ? scaled : cfg.ks;
    std::vector<CascadeStage> cascade;
    if (!vectors.empty()) {
      cascade = cascade_cluster(vectors, ks, cfg.kmeans_options(), cfg.restage);
      final_cluster = cascade.back().mapping;
    } else {
      r.status = "skipped";
    }
    write_assignments(out.assignments(), h, cascade);
    json sj = json::array();
    for (const auto& s : cascade) {
      sj.push_back({{"k", s.assignment.k},
                    {"inertia", s.assignment.inertia},
                    {"iterations", s.assignment.iterations_run}});
    }
    write_json(out.cluster_stages(), h,
               {{"configured_ks", cfg.ks}, {"ks", ks}, {"restage", to_string(cfg.restage)}, {"stages", sj}});
    std::set<std::size_t> used;
    for (const auto& [_, c] : final_cluster) used.insert(c);
    r.outputs["clusters"] = used.size();
    m.counts["clusters"] = used.size();
  });

  std::vector<DefinitionCandidate> survivors;
  stages.run("dedup", [&](StageRecord& r) {
    r.inputs["kept"] = kept.size();
    const auto labels = final_labels(kept, final_cluster);
    auto res = dedup_within_clusters(kept, labels, cfg.dedup_threshold, cfg.fuzzy_mode);
    std::vector<std::size_t> surv_labels;
    for (const auto& c : res.survivors) surv_labels.push_back(final_cluster.at(c.id()));
    const auto cross = cross_cluster_duplicates(res.survivors, surv_labels, cfg.dedup_threshold, cfg.fuzzy_mode);
    write_records(out.definitions(), h, to_records(res.survivors));
    write_dedup_decisions(out.dedup_decisions(), h, res.decisions);
    write_dedup_decisions(out.cross_cluster(), h, cross);
    survivors = std::move(res.survivors);
    r.outputs["survivors"] = survivors.size();
    r.outputs["dropped"] = res.decisions.size();
    r.outputs["cross_cluster_pairs"] = cross.size();
    m.counts["survivors"] = survivors.size();
  });

  ComponentsOutcome comp;
  stages.run("components", [&](StageRecord& r) {
    const auto lex = load_lexicon(cfg.lexicon);
    std::vector<std::string> survey_sentences;
    for (const auto& d : corpus.with_source(Source::survey)) {
      for (auto& s : split_sentences(d.text)) survey_sentences.push_back(std::move(s.text));
    }
    comp = components_stage(to_records(survivors), survey_sentences, lex, cfg.ngram_sizes, out, h);
    std::size_t tags = 0, tagged = 0;
    for (const auto& rec : comp.tagged) {
      tags += rec.components.size();
      tagged += rec.components.empty() ? 0 : 1;
    }
    r.inputs["survivors"] = survivors.size();
    r.inputs["survey_sentences"] = survey_sentences.size();
    r.outputs["tagged"] = tagged;
    r.outputs["tags"] = tags;
    r.outputs["excluded_other"] = comp.excluded_other;
    if (!comp.contingency_written) r.status = "skipped";
    m.counts["tagged"] = tagged;
    m.counts["tags"] = tags;
  });

  stages.run("stats", [&](StageRecord& r) {
    if (comp.contingency_written) {
      const auto table = read_contingency(out.contingency());
      const auto res = stats_stage(&table, "", cfg.smoothing, cfg.residual_kind, cfg.groups, out, h);
      r.outputs["significant_cells"] = res.significant_cells;
    } else {
      stats_stage(nullptr, "no definitions survived", cfg.smoothing, cfg.residual_kind, cfg.groups, out, h);
      r.status = "skipped";
    }
  });

  write_json(out.run_manifest(), h, to_json(m));
  stages.run("report", [&](StageRecord&) { emit_report(m, out, h); });
  m.finished_at = now_iso();
  write_json(out.run_manifest(), h, to_json(m));
  return m;
}

}  // namespace defminer
