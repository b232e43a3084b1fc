#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "defminer/artifacts.hpp"
#include "defminer/clustering.hpp"
#include "defminer/components.hpp"
#include "defminer/corpus.hpp"
#include "defminer/dedup.hpp"
#include "defminer/filter.hpp"
#include "defminer/sentence.hpp"
#include "defminer/stats.hpp"
#include "defminer/vector_space.hpp"
#include "json.hpp"

namespace defminer {

struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path domain_rules;
  std::filesystem::path filter_rules;
  std::filesystem::path lexicon;
  PatternTemplate::Options pattern;
  ClassifierEndpoint classifier;
  EmbeddingEndpoint embedding;
  std::vector<std::size_t> ks = {400, 100, 50};
  /// Scale ks to the number of kept candidates (ceil(k * n / reference_n)).
  bool scale_ks = true;
  std::size_t reference_n = 800;
  RestageMode restage = RestageMode::centroids;
  std::size_t max_iter = 300;
  double tol = 1e-6;
  std::size_t n_init = 10;
  double dedup_threshold = 0.90;
  FuzzyMode fuzzy_mode = FuzzyMode::normalized;
  Smoothing smoothing = Smoothing::add_half_zero_cells;
  ResidualKind residual_kind = ResidualKind::pearson;
  std::size_t groups = 2;
  std::vector<std::size_t> ngram_sizes = {2, 3};
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "defminer_out";

  KMeansOptions kmeans_options() const;
  ArtifactHeader header() const;
};

/// Parses a config object. Relative paths resolve against `base_dir`.
/// Unknown keys are a UsageError.
PipelineConfig config_from_json(const nlohmann::json& j,
                                const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
/// Canonical form; the inverse of config_from_json.
nlohmann::json to_json(const PipelineConfig& cfg);
/// FNV-1a of the canonical config without output_dir, so the same
/// configuration written to two places hashes the same.
std::string config_hash(const PipelineConfig& cfg);
/// Throws UsageError for a missing referenced file or an out-of-range value.
void validate(const PipelineConfig& cfg);

/// Artifact locations under an output directory.
struct Layout {
  std::filesystem::path root;

  std::filesystem::path corpus() const { return root / "01_corpus" / "corpus.norm.jsonl"; }
  std::filesystem::path corpus_manifest() const { return root / "01_corpus" / "manifest.json"; }
  std::filesystem::path candidates() const { return root / "02_candidates" / "candidates.jsonl"; }
  std::filesystem::path extraction() const { return root / "02_candidates" / "extraction.json"; }
  std::filesystem::path verdicts() const { return root / "03_filtered" / "verdicts.jsonl"; }
  std::filesystem::path kept() const { return root / "03_filtered" / "kept.jsonl"; }
  std::filesystem::path dropped() const { return root / "03_filtered" / "dropped.jsonl"; }
  std::filesystem::path audit() const { return root / "03_filtered" / "audit.json"; }
  std::filesystem::path vectors() const { return root / "04_vectors" / "vectors.jsonl"; }
  std::filesystem::path assignments() const { return root / "05_clusters" / "assignments.jsonl"; }
  std::filesystem::path cluster_stages() const { return root / "05_clusters" / "stages.json"; }
  std::filesystem::path definitions() const { return root / "06_definitions" / "definitions.jsonl"; }
  std::filesystem::path dedup_decisions() const { return root / "06_definitions" / "dedup_decisions.csv"; }
  std::filesystem::path cross_cluster() const { return root / "06_definitions" / "cross_cluster.csv"; }
  std::filesystem::path tagged() const { return root / "07_components" / "tagged.jsonl"; }
  std::filesystem::path freq_unigram(FrequencyScope s) const;
  std::filesystem::path freq_ngram(std::size_t n, FrequencyScope s) const;
  std::filesystem::path temporal() const { return root / "07_components" / "temporal.csv"; }
  std::filesystem::path contingency() const { return root / "07_components" / "contingency.csv"; }
  std::filesystem::path chisq() const { return root / "08_stats" / "chisq.json"; }
  std::filesystem::path residuals() const { return root / "08_stats" / "residuals.csv"; }
  std::filesystem::path residual_corr() const { return root / "08_stats" / "residual_corr.csv"; }
  std::filesystem::path linkage() const { return root / "08_stats" / "linkage.csv"; }
  std::filesystem::path groups() const { return root / "08_stats" / "groups.json"; }
  std::filesystem::path report() const { return root / "09_report" / "report.json"; }
  std::filesystem::path digest() const { return root / "09_report" / "digest.txt"; }
  std::filesystem::path run_manifest() const { return root / "run_manifest.json"; }
};

struct StageRecord {
  std::string name;
  std::map<std::string, std::size_t> inputs;
  std::map<std::string, std::size_t> outputs;
  double wall_ms = 0.0;
  std::string status = "ok";  // ok | skipped
};

struct RunManifest {
  std::string version = kToolVersion;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<StageRecord> stages;
  /// documents, candidates, kept, clusters, survivors, tagged, tags, ...
  std::map<std::string, std::size_t> counts;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Runs every stage and writes all artifacts under cfg.output_dir. A stage
/// failure throws StageError naming the stage; earlier artifacts remain.
RunManifest run_pipeline(const PipelineConfig& cfg);

// Stage steps shared by `run` and the single-stage subcommands. Each reads
// its inputs, writes its artifacts and returns the counts it produced.

std::vector<DefinitionCandidate> read_candidates(const std::filesystem::path& path);
void write_candidates(const std::filesystem::path& path, const ArtifactHeader& h,
                      const std::vector<DefinitionCandidate>& cands);
std::vector<DefinitionVector> read_vectors(const std::filesystem::path& path);
void write_vectors(const std::filesystem::path& path, const ArtifactHeader& h,
                   const std::vector<DefinitionVector>& vectors);
/// Final-stage cluster of every candidate id from an assignments file.
std::map<std::string, std::size_t> read_final_assignment(const std::filesystem::path& path);
void write_assignments(const std::filesystem::path& path, const ArtifactHeader& h,
                       const std::vector<CascadeStage>& stages);
std::vector<DefinitionRecord> read_records(const std::filesystem::path& path);
void write_records(const std::filesystem::path& path, const ArtifactHeader& h,
                   const std::vector<DefinitionRecord>& records);
void write_dedup_decisions(const std::filesystem::path& path, const ArtifactHeader& h,
                           const std::vector<DedupDecision>& decisions);
void write_frequency(const std::filesystem::path& path, const ArtifactHeader& h,
                     const FrequencyTable& t);
void write_temporal(const std::filesystem::path& path, const ArtifactHeader& h,
                    const TemporalSeries& s);
void write_contingency(const std::filesystem::path& path, const ArtifactHeader& h,
                       const ContingencyTable& t);
ContingencyTable read_contingency(const std::filesystem::path& path);

/// Survivor records joined with candidate provenance.
std::vector<DefinitionRecord> to_records(const std::vector<DefinitionCandidate>& survivors);

/// Tags records and writes the frequency, n-gram, temporal and contingency
/// artifacts. `survey_sentences` feed the survey-scope frequency tables.
/// Returns the tagged records; the contingency file is skipped (and
/// `contingency_written` false) when no definition survived.
struct ComponentsOutcome {
  std::vector<DefinitionRecord> tagged;
  bool contingency_written = false;
  std::size_t excluded_other = 0;
};
ComponentsOutcome components_stage(std::vector<DefinitionRecord> records,
                                   const std::vector<std::string>& survey_sentences,
                                   const ComponentLexicon& lex, const std::vector<std::size_t>& ngram_sizes,
                                   const Layout& out, const ArtifactHeader& h);

/// Writes chisq, residuals, correlation, linkage and groups artifacts. With
/// `table` absent every file is written in its "skipped" form.
struct StatsOutcome {
  bool skipped = false;
  std::string reason;
  std::size_t significant_cells = 0;
};
StatsOutcome stats_stage(const ContingencyTable* table, const std::string& skip_reason,
                         Smoothing smoothing, ResidualKind kind, std::size_t groups,
                         const Layout& out, const ArtifactHeader& h);

/// Renders report.json and digest.txt from the artifacts under `out`.
/// Throws DataError naming the first missing artifact.
void emit_report(const RunManifest& manifest, const Layout& out, const ArtifactHeader& h);

}  // namespace defminer
