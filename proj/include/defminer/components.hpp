#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "defminer/corpus.hpp"
#include "json.hpp"

namespace defminer {

/// The five component categories.
inline constexpr const char* kCategories[] = {"Data", "Analysis and services", "Infrastructure",
                                              "Interface", "System governance"};

struct Component {
  std::string name;
  std::string category;
  /// Case-insensitive phrase patterns; a trailing '*' on a word makes it a
  /// prefix match ("synchroniz*").
  std::vector<std::string> patterns;
};

class ComponentLexicon {
 public:
  ComponentLexicon() = default;
  /// Validates categories and name uniqueness.
  explicit ComponentLexicon(std::vector<Component> components);

  const std::vector<Component>& components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }
  std::vector<std::string> names() const;
  /// Index of a component by name; size() when absent.
  std::size_t index_of(const std::string& name) const;

 private:
  std::vector<Component> components_;
};

/// Lexicon file: `[{"name", "category", "patterns": [...]}, ...]`.
ComponentLexicon load_lexicon(const std::filesystem::path& path);
ComponentLexicon lexicon_from_json(const nlohmann::json& j);

/// Component names whose patterns match the sentence, in lexicon order.
std::vector<std::string> tag_components(const std::string& sentence, const ComponentLexicon& lex);

/// A filtered, deduplicated definition with provenance and component tags.
struct DefinitionRecord {
  std::string id;
  std::string doc_id;
  std::string sentence;
  Year year;
  Domain domain = Domain::other;
  std::vector<std::string> components;
};

enum class FrequencyScope { definitions, survey };

struct FrequencyRow {
  std::string term;
  std::size_t count = 0;
};

struct FrequencyTable {
  FrequencyScope scope = FrequencyScope::definitions;
  std::vector<FrequencyRow> rows;  // descending count, ties alphabetical
  std::size_t total = 0;

  std::vector<FrequencyRow> top(std::size_t n) const;
};

/// Unigram counts with the vector-space tokenizer (stopwords removed).
FrequencyTable term_frequencies(const std::vector<std::string>& sentences,
                                FrequencyScope scope = FrequencyScope::definitions);

/// Sliding-window n-grams (stopwords kept) within each sentence, n in [2, 5].
FrequencyTable ngram_frequencies(const std::vector<std::string>& sentences, std::size_t n,
                                 FrequencyScope scope = FrequencyScope::definitions);

inline constexpr int kSeriesFirstYear = 2000;
inline constexpr int kSeriesLastYear = 2024;

struct TemporalSeries {
  std::vector<std::string> components;
  /// counts[c][y - kSeriesFirstYear]
  std::vector<std::vector<std::size_t>> counts;
  std::size_t excluded_unknown_year = 0;
  std::size_t excluded_out_of_range = 0;

  std::size_t at(std::size_t component, int year) const;
  /// Running totals per component.
  std::vector<std::vector<std::size_t>> cumulative() const;
};

TemporalSeries temporal_series(const std::vector<DefinitionRecord>& records,
                               const ComponentLexicon& lex);

struct ContingencyTable {
  std::vector<std::string> rows;  // components
  std::vector<std::string> cols;  // domains
  std::vector<std::vector<double>> observed;

  double total() const;
  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
};

struct ContingencyBuild {
  ContingencyTable table;
  std::size_t excluded_other = 0;
};

/// Component x domain counts over the four analysis domains; records in
/// `other` are excluded and counted. Throws DataError when no tag lands in
/// the table.
ContingencyBuild contingency(const std::vector<DefinitionRecord>& records,
                             const ComponentLexicon& lex);

nlohmann::json to_json(const DefinitionRecord& r);
DefinitionRecord record_from_json(const nlohmann::json& j);

}  // namespace defminer
