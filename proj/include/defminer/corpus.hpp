#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace defminer {

enum class Domain { building, architecture, urban, manufacturing, other };
enum class Source { article, survey };

/// The four analysis domains in contingency column order.
inline constexpr Domain kAnalysisDomains[] = {Domain::building, Domain::architecture,
                                              Domain::urban, Domain::manufacturing};

std::string_view to_string(Domain d);
std::string_view to_string(Source s);
std::optional<Domain> parse_domain(std::string_view s);
std::optional<Source> parse_source(std::string_view s);

/// Calendar year, or unknown. Unknown years never enter temporal analysis.
using Year = std::optional<int>;

inline constexpr int kMinYear = 1900;
inline constexpr int kMaxYear = 2100;

/// How a document's domain label was obtained.
enum class DomainOrigin { metadata, rules };

struct Document {
  std::string id;
  std::string title;
  Year year;
  std::string venue;
  std::string subject;
  Domain domain = Domain::other;
  DomainOrigin domain_origin = DomainOrigin::rules;
  Source source = Source::article;
  std::string text;

  bool operator==(const Document&) const = default;
};

struct CorpusManifest {
  std::map<std::string, std::size_t> per_source;
  std::map<std::string, std::size_t> per_domain;
  std::map<std::string, std::size_t> per_year;  // "unknown" for missing years

  bool operator==(const CorpusManifest&) const = default;
};

/// Ordered, immutable-after-construction document collection.
class Corpus {
 public:
  Corpus() = default;
  /// Validates id uniqueness and builds the manifest.
  explicit Corpus(std::vector<Document> docs);

  const std::vector<Document>& documents() const noexcept { return docs_; }
  const CorpusManifest& manifest() const noexcept { return manifest_; }
  std::size_t size() const noexcept { return docs_.size(); }

  /// Recounts from the documents; equals manifest() by construction.
  CorpusManifest recount() const;

  /// Documents with the given source, file order preserved.
  std::vector<Document> with_source(Source s) const;

  bool operator==(const Corpus&) const = default;

 private:
  std::vector<Document> docs_;
  CorpusManifest manifest_;
};

enum class CorpusFormat { jsonl };

/// Loads and normalizes a corpus file. Throws DataError with the offending
/// line number on malformed records, on duplicate ids and on empty input.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format = CorpusFormat::jsonl);

/// Parses JSONL text directly; `origin` is used in error messages only.
Corpus parse_corpus_jsonl(std::string_view content, std::string_view origin = "<memory>");

nlohmann::json to_json(const Document& d);
Document document_from_json(const nlohmann::json& j);

struct DomainRule {
  Domain domain = Domain::other;
  std::vector<std::string> keywords;
};

using DomainRules = std::vector<DomainRule>;

/// First rule with any keyword occurring (case-insensitive substring) in
/// title, subject or venue wins; otherwise Domain::other.
Domain assign_domain(const Document& doc, const DomainRules& rules);

/// Rules file: `[{"domain": "building", "keywords": ["BIM", ...]}, ...]`.
DomainRules load_domain_rules(const std::filesystem::path& path);
DomainRules domain_rules_from_json(const nlohmann::json& j);

/// Applies rules to documents without a metadata domain. Returns a new corpus.
Corpus apply_domain_rules(const Corpus& corpus, const DomainRules& rules);

}  // namespace defminer
