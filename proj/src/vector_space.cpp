#include "defminer/vector_space.hpp"

#include <unicode/uchar.h>

#include <algorithm>
#include <cmath>
#include <spdlog/spdlog.h>

#include "defminer/endpoint.hpp"
#include "defminer/error.hpp"
#include "defminer/text.hpp"

namespace defminer {

const std::set<std::string, std::less<>>& default_stopwords() {
  // NLTK English list.
  static const std::set<std::string, std::less<>> words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
      "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers",
      "herself", "it", "its", "itself", "they", "them", "their", "theirs", "themselves",
      "what", "which", "who", "whom", "this", "that", "these", "those", "am", "is", "are",
      "was", "were", "be", "been", "being", "have", "has", "had", "having", "do", "does",
      "did", "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as", "until",
      "while", "of", "at", "by", "for", "with", "about", "against", "between", "into",
      "through", "during", "before", "after", "above", "below", "to", "from", "up", "down",
      "in", "out", "on", "off", "over", "under", "again", "further", "then", "once", "here",
      "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
      "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so",
      "than", "too", "very", "s", "t", "can", "will", "just", "don", "should", "now", "d",
      "ll", "m", "o", "re", "ve", "y", "ain", "aren", "couldn", "didn", "doesn", "hadn",
      "hasn", "haven", "isn", "ma", "mightn", "mustn", "needn", "shan", "shouldn", "wasn",
      "weren", "won", "wouldn", "could", "would"};
  return words;
}

namespace {

bool is_hyphen(char32_t c) { return c == U'-' || c == 0x2010 || c == 0x2011; }

bool is_alnum(char32_t c) { return u_isalnum(static_cast<UChar32>(c)) != 0; }

}  // namespace

std::vector<std::string> tokenize(std::string_view sentence, const TokenizerOptions& opts) {
  const std::u32string cps = text::to_u32(sentence);
  std::vector<std::string> out;
  std::u32string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (current.size() >= opts.min_length) {
      std::string tok = text::to_utf8(current);
      if (!opts.drop_stopwords || !default_stopwords().contains(tok)) out.push_back(std::move(tok));
    }
    current.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (is_alnum(c)) {
      current.push_back(static_cast<char32_t>(u_tolower(static_cast<UChar32>(c))));
    } else if (is_hyphen(c) && !current.empty() && i + 1 < cps.size() && is_alnum(cps[i + 1])) {
      current.push_back(U'_');
    } else {
      flush();
    }
  }
  flush();
  return out;
}

Vocabulary::Vocabulary(std::map<std::string, std::size_t> document_frequency, std::size_t n_docs,
                       std::size_t max_ngram, TokenizerOptions tokenizer)
    : n_docs_(n_docs), max_ngram_(max_ngram), tokenizer_(tokenizer) {
  terms_.reserve(document_frequency.size());
  for (auto& [term, df] : document_frequency) {
    index_.emplace(term, terms_.size());
    terms_.push_back(term);
    df_.push_back(df);
    idf_.push_back(std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) +
                   1.0);
  }
}

std::size_t Vocabulary::index_of(std::string_view term) const {
  auto it = index_.find(term);
  return it == index_.end() ? terms_.size() : it->second;
}

std::size_t Vocabulary::document_frequency(std::string_view term) const {
  const std::size_t i = index_of(term);
  return i == terms_.size() ? 0 : df_[i];
}

std::vector<std::string> Vocabulary::terms_of(std::string_view sentence) const {
  const auto tokens = tokenize(sentence, tokenizer_);
  std::vector<std::string> terms = tokens;
  for (std::size_t n = 2; n <= max_ngram_; ++n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t k = 1; k < n; ++k) gram += " " + tokens[i + k];
      terms.push_back(std::move(gram));
    }
  }
  return terms;
}

Vocabulary fit_vectorizer(std::span<const std::string> sentences, const VectorizerOptions& opts) {
  if (sentences.empty()) throw DataError("cannot fit a vectorizer on zero sentences");
  if (opts.max_ngram < 1) throw UsageError("max_ngram must be >= 1");
  // terms_of only needs the tokenizer settings.
  const Vocabulary probe({}, 0, opts.max_ngram, opts.tokenizer);
  std::map<std::string, std::size_t> df;
  for (const auto& s : sentences) {
    auto terms = probe.terms_of(s);
    std::set<std::string> unique(terms.begin(), terms.end());
    for (const auto& t : unique) ++df[t];
  }
  return Vocabulary(std::move(df), sentences.size(), opts.max_ngram, opts.tokenizer);
}

DefinitionVector::DefinitionVector(std::string candidate_id, std::vector<double> values)
    : candidate_id_(std::move(candidate_id)), values_(std::move(values)) {
  double sq = 0.0;
  for (double v : values_) sq += v * v;
  norm_ = std::sqrt(sq);
}

DefinitionVector embed(std::string candidate_id, std::string_view sentence,
                       const Vocabulary& vocab) {
  std::vector<double> values(vocab.dimension(), 0.0);
  for (const auto& t : vocab.terms_of(sentence)) {
    const std::size_t i = vocab.index_of(t);
    if (i < values.size()) values[i] += 1.0;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] *= vocab.idf(i);
    sq += values[i] * values[i];
  }
  if (sq > 0.0) {
    const double n = std::sqrt(sq);
    for (double& v : values) v /= n;
  }
  return DefinitionVector(std::move(candidate_id), std::move(values));
}

double cosine_similarity(const DefinitionVector& a, const DefinitionVector& b) {
  if (a.dimension() != b.dimension()) {
    throw DataError("dimension mismatch: " + std::to_string(a.dimension()) + " vs " +
                    std::to_string(b.dimension()));
  }
  if (a.degenerate() || b.degenerate()) throw DataError("degenerate vector");
  double dot = 0.0;
  double xx = 0.0;
  double yy = 0.0;
  const auto& x = a.values();
  const auto& y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  // sqrt(s * s) == s in IEEE arithmetic, so sim(a, a) is exactly 1.
  const double sim = dot / std::sqrt(xx * yy);
  return std::clamp(sim, -1.0, 1.0);
}

std::vector<DefinitionVector> embed_baseline(std::span<const IdentifiedText> items,
                                             const VectorizerOptions& opts) {
  std::vector<std::string> sentences;
  sentences.reserve(items.size());
  for (const auto& it : items) sentences.push_back(it.text);
  const Vocabulary vocab = fit_vectorizer(sentences, opts);
  std::vector<DefinitionVector> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(embed(it.id, it.text, vocab));
  return out;
}

std::vector<DefinitionVector> embed_external(std::span<const IdentifiedText> items,
                                             const EmbeddingEndpoint& ep,
                                             const VectorizerOptions& fallback_opts) {
  if (!ep.enabled) return embed_baseline(items, fallback_opts);

  nlohmann::json body;
  body["texts"] = nlohmann::json::array();
  for (const auto& it : items) body["texts"].push_back(it.text);

  nlohmann::json reply;
  std::vector<std::vector<double>> rows;
  try {
    reply = post_json(ep.url, body, ep.timeout);
    rows = reply.at("vectors").get<std::vector<std::vector<double>>>();
    if (rows.size() != items.size()) {
      throw EndpointError("embedding endpoint returned " + std::to_string(rows.size()) +
                          " vectors for " + std::to_string(items.size()) + " texts");
    }
  } catch (const std::exception& e) {
    if (!ep.allow_fallback) throw EndpointError(e.what());
    spdlog::warn("embedding endpoint failed ({}); using TF-IDF baseline", e.what());
    return embed_baseline(items, fallback_opts);
  }

  std::vector<DefinitionVector> out;
  out.reserve(rows.size());
  const std::size_t dim = rows.empty() ? 0 : rows.front().size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw DataError("embedding dimension mismatch: " + std::to_string(dim) +
                      " vs " + std::to_string(rows[i].size()));
    }
    out.emplace_back(items[i].id, std::move(rows[i]));
  }
  return out;
}

nlohmann::json to_json(const DefinitionVector& v) {
  return {{"candidate_id", v.candidate_id()}, {"values", v.values()}};
}

DefinitionVector vector_from_json(const nlohmann::json& j) {
  try {
    return DefinitionVector(j.at("candidate_id").get<std::string>(),
                            j.at("values").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed vector record: ") + e.what());
  }
}

}  // namespace defminer
