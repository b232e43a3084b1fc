#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "defminer/sentence.hpp"
#include "json.hpp"

namespace defminer {

enum class Completeness { complete, incomplete };

std::string_view to_string(Completeness c);

struct FilterVerdict {
  std::string candidate_id;
  Completeness label = Completeness::complete;
  /// Heuristic that fired ("short_tail", "buzz_phrase", "no_content"),
  /// "pass" for complete heuristic verdicts, "external" or "fallback".
  std::string rule;
  double confidence = 1.0;
};

/// Deterministic Incomplete-Definition rules. Defaults mirror
/// data/filter_rules.json.
struct FilterRules {
  std::size_t min_content_tokens = 6;
  std::vector<std::string> buzz_phrases = {"revolution", "new paradigm",
                                           "revolutionizing technology", "game changer"};
  PatternTemplate pattern;
};

/// `{"min_content_tokens": 6, "buzz_phrases": [...], "pattern": {...}}`;
/// absent keys keep their defaults.
FilterRules filter_rules_from_json(const nlohmann::json& j);
FilterRules load_filter_rules(const std::filesystem::path& path);
PatternTemplate::Options pattern_options_from_json(const nlohmann::json& j,
                                                   PatternTemplate::Options base = {});

/// Text after the copula/marker; the whole sentence when the pattern does
/// not match.
std::string definition_tail(const DefinitionCandidate& c, const PatternTemplate& pattern);

/// Labels a candidate incomplete when its tail has no content token, contains
/// a buzz phrase, or has fewer than min_content_tokens content tokens
/// (checked in that order).
FilterVerdict heuristic_filter(const DefinitionCandidate& c, const FilterRules& rules);

struct ClassifierEndpoint {
  std::string url;
  std::chrono::milliseconds timeout{10000};
  std::string prompt_template =
      "Is the following sentence a complete definition of a digital twin? "
      "Answer complete or incomplete.\n\n{sentence}";
  bool enabled = false;
  /// When false an endpoint failure raises EndpointError instead.
  bool allow_fallback = true;
  std::size_t max_in_flight = 4;
};

/// Asks the external classifier; falls back to heuristic_filter (rule
/// "fallback") on any failure. A disabled endpoint is never contacted.
FilterVerdict classify_external(const DefinitionCandidate& c, const ClassifierEndpoint& ep,
                                const FilterRules& rules);

/// One verdict per candidate, in candidate order. External calls run with at
/// most ep.max_in_flight requests outstanding.
std::vector<FilterVerdict> classify_all(const std::vector<DefinitionCandidate>& cands,
                                        const ClassifierEndpoint& ep, const FilterRules& rules);

struct FilterOutcome {
  std::vector<DefinitionCandidate> kept;
  std::vector<DefinitionCandidate> dropped;
  std::map<std::string, std::size_t> audit;  // rule -> count
};

/// Partitions candidates by verdict. Throws DataError for a missing or
/// duplicated verdict.
FilterOutcome apply_filter(const std::vector<DefinitionCandidate>& cands,
                           const std::vector<FilterVerdict>& verdicts);

nlohmann::json to_json(const FilterVerdict& v);

}  // namespace defminer
