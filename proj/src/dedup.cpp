#include "defminer/dedup.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <spdlog/spdlog.h>

#include "defminer/error.hpp"
#include "defminer/text.hpp"

namespace defminer {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(text::to_u32(a), text::to_u32(b));
}

namespace {

std::u32string prepare(std::string_view s, FuzzyMode mode) {
  return text::to_u32(mode == FuzzyMode::normalized ? text::dedup_key(s) : std::string(s));
}

double score_prepared(const std::u32string& a, const std::u32string& b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

/// Upper bound of the score from lengths alone: lev >= |len(a) - len(b)|.
bool may_reach(const std::u32string& a, const std::u32string& b, double threshold) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return true;
  const std::size_t diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
  return 1.0 - static_cast<double>(diff) / static_cast<double>(longest) >= threshold;
}

}  // namespace

double fuzzy_match(std::string_view a, std::string_view b, FuzzyMode mode) {
  const auto x = prepare(a, mode);
  const auto y = prepare(b, mode);
  if (x.empty() && y.empty()) spdlog::debug("fuzzy_match on two empty strings");
  return score_prepared(x, y);
}

DedupResult dedup_cluster(const std::vector<DefinitionCandidate>& members, double threshold,
                          std::size_t cluster, FuzzyMode mode) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw UsageError("dedup threshold must be in (0, 1]");
  }
  DedupResult out;
  std::vector<std::u32string> kept_keys;
  for (const auto& c : members) {
    const auto key = prepare(c.sentence, mode);
    bool dropped = false;
    for (std::size_t s = 0; s < out.survivors.size(); ++s) {
      if (!may_reach(key, kept_keys[s], threshold)) continue;
      const double score = score_prepared(kept_keys[s], key);
      if (score >= threshold) {
        out.decisions.push_back({out.survivors[s].id(), c.id(), score, cluster});
        dropped = true;
        break;
      }
    }
    if (!dropped) {
      out.survivors.push_back(c);
      kept_keys.push_back(key);
    }
  }
  return out;
}

DedupResult dedup_within_clusters(const std::vector<DefinitionCandidate>& cands,
                                  const std::vector<std::size_t>& cluster_of, double threshold,
                                  FuzzyMode mode) {
  if (cands.size() != cluster_of.size()) throw DataError("cluster labels do not match candidates");
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < cands.size(); ++i) groups[cluster_of[i]].push_back(i);

  std::vector<bool> keep(cands.size(), false);
  DedupResult out;
  for (const auto& [cluster, idx] : groups) {
    std::vector<DefinitionCandidate> members;
    for (std::size_t i : idx) members.push_back(cands[i]);
    DedupResult part = dedup_cluster(members, threshold, cluster, mode);
    std::size_t s = 0;
    for (std::size_t i : idx) {
      if (s < part.survivors.size() && part.survivors[s].id() == cands[i].id()) {
        keep[i] = true;
        ++s;
      }
    }
    out.decisions.insert(out.decisions.end(), part.decisions.begin(), part.decisions.end());
  }
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (keep[i]) out.survivors.push_back(cands[i]);
  }
  return out;
}

std::vector<DedupDecision> cross_cluster_duplicates(const std::vector<DefinitionCandidate>& survivors,
                                                    const std::vector<std::size_t>& cluster_of,
                                                    double threshold, FuzzyMode mode) {
  if (survivors.size() != cluster_of.size()) {
    throw DataError("cluster labels do not match survivors");
  }
  std::vector<std::u32string> keys;
  keys.reserve(survivors.size());
  for (const auto& c : survivors) keys.push_back(prepare(c.sentence, mode));
  std::vector<DedupDecision> out;
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    for (std::size_t j = i + 1; j < survivors.size(); ++j) {
      if (cluster_of[i] == cluster_of[j] || !may_reach(keys[i], keys[j], threshold)) continue;
      const double score = score_prepared(keys[i], keys[j]);
      if (score >= threshold) out.push_back({survivors[i].id(), survivors[j].id(), score, cluster_of[j]});
    }
  }
  return out;
}

}  // namespace defminer
