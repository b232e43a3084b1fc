#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "defminer/sentence.hpp"

namespace defminer {

/// Edit distance (insert, delete, substitute; unit costs) over Unicode
/// scalar values.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

enum class FuzzyMode {
  /// Compare dedup keys (case folded, whitespace collapsed).
  normalized,
  /// Compare the strings as given.
  raw,
};

/// 1 - levenshtein / max(length), lengths in scalar values. Two empty
/// strings are identical (1.0).
double fuzzy_match(std::string_view a, std::string_view b, FuzzyMode mode = FuzzyMode::normalized);

struct DedupDecision {
  std::string kept_id;
  std::string dropped_id;
  double score = 0.0;
  std::size_t cluster = 0;
};

struct DedupResult {
  std::vector<DefinitionCandidate> survivors;
  std::vector<DedupDecision> decisions;
};

/// Greedy sweep in the given (corpus) order: each member is compared with
/// the earlier survivors and dropped at the first score >= threshold.
DedupResult dedup_cluster(const std::vector<DefinitionCandidate>& members, double threshold,
                          std::size_t cluster = 0, FuzzyMode mode = FuzzyMode::normalized);

/// Applies dedup_cluster inside every cluster. `cluster_of[i]` is the
/// cluster of cands[i]; survivors come back in the original order.
DedupResult dedup_within_clusters(const std::vector<DefinitionCandidate>& cands,
                                  const std::vector<std::size_t>& cluster_of, double threshold,
                                  FuzzyMode mode = FuzzyMode::normalized);

/// Pairs of survivors in different clusters scoring >= threshold. Reported,
/// never removed.
std::vector<DedupDecision> cross_cluster_duplicates(const std::vector<DefinitionCandidate>& survivors,
                                                    const std::vector<std::size_t>& cluster_of,
                                                    double threshold,
                                                    FuzzyMode mode = FuzzyMode::normalized);

}  // namespace defminer
