#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace defminer {

/// The shipped English stopword list.
const std::set<std::string, std::less<>>& default_stopwords();

struct TokenizerOptions {
  bool drop_stopwords = true;
  std::size_t min_length = 2;  // in code points

  bool operator==(const TokenizerOptions&) const = default;
};

/// Lowercases, splits on non-alphanumerics and joins hyphenated compounds
/// with '_' ("real-time" -> "real_time").
std::vector<std::string> tokenize(std::string_view sentence, const TokenizerOptions& opts = {});

/// Fitted TF-IDF vocabulary over unigrams and bigrams. Column indices follow
/// lexicographic term order, so fitting is order independent.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::map<std::string, std::size_t> document_frequency, std::size_t n_docs,
             std::size_t max_ngram, TokenizerOptions tokenizer);

  std::size_t dimension() const noexcept { return terms_.size(); }
  std::size_t n_docs() const noexcept { return n_docs_; }
  std::size_t max_ngram() const noexcept { return max_ngram_; }
  const TokenizerOptions& tokenizer() const noexcept { return tokenizer_; }

  /// Column of a term, or dimension() when absent.
  std::size_t index_of(std::string_view term) const;
  const std::string& term(std::size_t index) const { return terms_.at(index); }
  std::size_t document_frequency(std::string_view term) const;
  /// Smoothed idf: ln((1 + N) / (1 + df)) + 1.
  double idf(std::size_t index) const { return idf_.at(index); }

  /// Terms (unigrams and n-grams up to max_ngram) of one sentence, with repeats.
  std::vector<std::string> terms_of(std::string_view sentence) const;

  bool operator==(const Vocabulary&) const = default;

 private:
  std::vector<std::string> terms_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::size_t n_docs_ = 0;
  std::size_t max_ngram_ = 2;
  TokenizerOptions tokenizer_;
};

struct VectorizerOptions {
  std::size_t max_ngram = 2;
  TokenizerOptions tokenizer;
};

/// Throws DataError on empty input.
Vocabulary fit_vectorizer(std::span<const std::string> sentences,
                          const VectorizerOptions& opts = {});

class DefinitionVector {
 public:
  DefinitionVector() = default;
  DefinitionVector(std::string candidate_id, std::vector<double> values);

  const std::string& candidate_id() const noexcept { return candidate_id_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t dimension() const noexcept { return values_.size(); }
  double norm() const noexcept { return norm_; }
  bool degenerate() const noexcept { return norm_ == 0.0; }

  bool operator==(const DefinitionVector&) const = default;

 private:
  std::string candidate_id_;
  std::vector<double> values_;
  double norm_ = 0.0;
};

/// L2-normalized TF-IDF vector; all-OOV sentences give a degenerate zero vector.
DefinitionVector embed(std::string candidate_id, std::string_view sentence,
                       const Vocabulary& vocab);

/// dot(a, b) / (|a| |b|). Throws DataError("degenerate vector") on a zero
/// operand and on a dimension mismatch.
double cosine_similarity(const DefinitionVector& a, const DefinitionVector& b);

struct EmbeddingEndpoint {
  std::string url;
  std::chrono::milliseconds timeout{10000};
  bool enabled = false;
  bool allow_fallback = true;
};

struct IdentifiedText {
  std::string id;
  std::string text;
};

/// Fetches vectors from `{"texts": [...]}` -> `{"vectors": [[...]]}`. On a
/// transport failure falls back to the TF-IDF baseline fitted on `items`
/// (unless fallback is disallowed, then EndpointError). A batch with
/// inconsistent dimensions is a DataError.
std::vector<DefinitionVector> embed_external(std::span<const IdentifiedText> items,
                                             const EmbeddingEndpoint& ep,
                                             const VectorizerOptions& fallback_opts = {});

/// Baseline path: fit on all items, embed each.
std::vector<DefinitionVector> embed_baseline(std::span<const IdentifiedText> items,
                                             const VectorizerOptions& opts = {});

nlohmann::json to_json(const DefinitionVector& v);
DefinitionVector vector_from_json(const nlohmann::json& j);

}  // namespace defminer
