#pragma once

#include <cstddef>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "defminer/corpus.hpp"
#include "json.hpp"

namespace defminer {

/// Byte offsets [start, end) into a document's normalized text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

struct Sentence {
  std::string text;
  Span span;
};

/// Splits normalized text at ". ", "? ", "! " and newlines. A period ending
/// one of the known abbreviations (e.g., i.e., et al., Fig., vs.) does not
/// terminate a sentence. Leading whitespace is not part of a span.
std::vector<Sentence> split_sentences(std::string_view text);

/// Generates the definition patterns: term, then a copula, then a marker.
/// The empty marker stands for the bare "X is ..." form. When a marker is
/// present the copula may be omitted ("digital twins defined as ...").
class PatternTemplate {
 public:
  struct Options {
    std::string term = "digital twin";
    bool plural = true;
    std::vector<std::string> copulas = {"is", "are", "can be", "could be"};
    std::vector<std::string> markers = {"defined as", "described as", "characterized by",
                                        ""};
    /// Raw user-supplied expressions, matched after the generated ones.
    std::vector<std::string> extra_patterns;
  };

  PatternTemplate();
  explicit PatternTemplate(Options opts);

  const Options& options() const noexcept { return opts_; }
  /// The regular-expression source of each generated pattern, in match order.
  const std::vector<std::string>& compiled() const noexcept { return sources_; }

  struct Match {
    std::string marker;     // "" for the bare copula form, "custom" for extras
    std::size_t tail_start; // offset in the sentence right after copula/marker
  };

  /// First pattern that matches anywhere in the sentence, case-insensitively.
  std::optional<Match> match(std::string_view sentence) const;

 private:
  struct Compiled {
    std::string marker;
    std::regex re;
  };

  Options opts_;
  std::vector<std::string> sources_;
  std::vector<Compiled> patterns_;
};

struct DefinitionCandidate {
  std::string doc_id;
  std::string sentence;
  Span span;
  std::string marker;
  Year year;
  Domain domain = Domain::other;
  std::size_t multiplicity = 1;

  /// Stable reference used by verdicts, vectors and cluster assignments.
  std::string id() const { return doc_id + "@" + std::to_string(span.start); }

  bool operator==(const DefinitionCandidate&) const = default;
};

/// One candidate per sentence of `doc` that matches the template.
std::vector<DefinitionCandidate> extract_candidates(const Document& doc,
                                                    const PatternTemplate& tmpl);

/// Extracts from every document in order.
std::vector<DefinitionCandidate> extract_all(const std::vector<Document>& docs,
                                             const PatternTemplate& tmpl);

/// Drops sentences that are identical after case folding and whitespace
/// collapse; the earliest occurrence survives and accumulates multiplicity.
std::vector<DefinitionCandidate> dedup_exact(const std::vector<DefinitionCandidate>& cands);

nlohmann::json to_json(const DefinitionCandidate& c);
DefinitionCandidate candidate_from_json(const nlohmann::json& j);

}  // namespace defminer
