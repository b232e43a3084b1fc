#include "defminer/components.hpp"

#include <algorithm>
#include <fstream>

#include "defminer/error.hpp"
#include "defminer/vector_space.hpp"

namespace defminer {

namespace {

const TokenizerOptions kAllWords{.drop_stopwords = false, .min_length = 1};

struct PatternToken {
  std::string text;
  bool prefix = false;
};

std::vector<PatternToken> compile_pattern(const std::string& pattern) {
  std::vector<PatternToken> out;
  std::size_t i = 0;
  while (i < pattern.size()) {
    while (i < pattern.size() && pattern[i] == ' ') ++i;
    std::size_t j = i;
    while (j < pattern.size() && pattern[j] != ' ') ++j;
    std::string word = pattern.substr(i, j - i);
    i = j;
    if (word.empty()) continue;
    bool prefix = false;
    if (word.back() == '*') {
      prefix = true;
      word.pop_back();
    }
    auto toks = tokenize(word, kAllWords);
    for (std::size_t k = 0; k < toks.size(); ++k) {
      out.push_back({std::move(toks[k]), prefix && k + 1 == toks.size()});
    }
  }
  return out;
}

bool matches_at(const std::vector<std::string>& words, std::size_t at,
                const std::vector<PatternToken>& pat) {
  if (at + pat.size() > words.size()) return false;
  for (std::size_t k = 0; k < pat.size(); ++k) {
    const auto& w = words[at + k];
    if (pat[k].prefix ? !w.starts_with(pat[k].text) : w != pat[k].text) return false;
  }
  return true;
}

bool matches(const std::vector<std::string>& words, const std::vector<PatternToken>& pat) {
  if (pat.empty()) return false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (matches_at(words, i, pat)) return true;
  }
  return false;
}

FrequencyTable finish(std::map<std::string, std::size_t> counts, FrequencyScope scope) {
  FrequencyTable t;
  t.scope = scope;
  for (auto& [term, n] : counts) {
    t.rows.push_back({term, n});
    t.total += n;
  }
  std::stable_sort(t.rows.begin(), t.rows.end(),
                   [](const FrequencyRow& a, const FrequencyRow& b) { return a.count > b.count; });
  return t;
}

}  // namespace

ComponentLexicon::ComponentLexicon(std::vector<Component> components)
    : components_(std::move(components)) {
  std::set<std::string> names;
  for (const auto& c : components_) {
    if (c.name.empty()) throw DataError("lexicon component with empty name");
    if (!names.insert(c.name).second) throw DataError("duplicate lexicon component " + c.name);
    if (std::none_of(std::begin(kCategories), std::end(kCategories),
                     [&](const char* k) { return c.category == k; })) {
      throw DataError("component " + c.name + " has unknown category '" + c.category + "'");
    }
  }
}

std::vector<std::string> ComponentLexicon::names() const {
  std::vector<std::string> out;
  for (const auto& c : components_) out.push_back(c.name);
  return out;
}

std::size_t ComponentLexicon::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i].name == name) return i;
  }
  return components_.size();
}

ComponentLexicon lexicon_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DataError("lexicon must be a JSON array");
  std::vector<Component> comps;
  try {
    for (const auto& e : j) {
      comps.push_back({e.at("name").get<std::string>(), e.at("category").get<std::string>(),
                       e.at("patterns").get<std::vector<std::string>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed lexicon: ") + e.what());
  }
  return ComponentLexicon(std::move(comps));
}

ComponentLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon " + path.string());
  try {
    return lexicon_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("malformed lexicon " + path.string() + ": " + e.what());
  }
}

std::vector<std::string> tag_components(const std::string& sentence, const ComponentLexicon& lex) {
  const auto words = tokenize(sentence, kAllWords);
  std::vector<std::string> tags;
  for (const auto& comp : lex.components()) {
    for (const auto& p : comp.patterns) {
      if (matches(words, compile_pattern(p))) {
        tags.push_back(comp.name);
        break;
      }
    }
  }
  return tags;
}

std::vector<FrequencyRow> FrequencyTable::top(std::size_t n) const {
  return {rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(std::min(n, rows.size()))};
}

FrequencyTable term_frequencies(const std::vector<std::string>& sentences, FrequencyScope scope) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences) {
    for (auto& t : tokenize(s)) ++counts[t];
  }
  return finish(std::move(counts), scope);
}

FrequencyTable ngram_frequencies(const std::vector<std::string>& sentences, std::size_t n,
                                 FrequencyScope scope) {
  if (n < 2 || n > 5) throw UsageError("n-gram size must be in [2, 5], got " + std::to_string(n));
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences) {
    const auto toks = tokenize(s, kAllWords);
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      std::string gram = toks[i];
      for (std::size_t k = 1; k < n; ++k) gram += " " + toks[i + k];
      ++counts[gram];
    }
  }
  return finish(std::move(counts), scope);
}

std::size_t TemporalSeries::at(std::size_t component, int year) const {
  if (year < kSeriesFirstYear || year > kSeriesLastYear) return 0;
  return counts.at(component).at(static_cast<std::size_t>(year - kSeriesFirstYear));
}

std::vector<std::vector<std::size_t>> TemporalSeries::cumulative() const {
  auto out = counts;
  for (auto& row : out) {
    for (std::size_t i = 1; i < row.size(); ++i) row[i] += row[i - 1];
  }
  return out;
}

TemporalSeries temporal_series(const std::vector<DefinitionRecord>& records,
                               const ComponentLexicon& lex) {
  TemporalSeries s;
  s.components = lex.names();
  const std::size_t years = kSeriesLastYear - kSeriesFirstYear + 1;
  s.counts.assign(lex.size(), std::vector<std::size_t>(years, 0));
  for (const auto& r : records) {
    if (!r.year) {
      ++s.excluded_unknown_year;
      continue;
    }
    if (*r.year < kSeriesFirstYear || *r.year > kSeriesLastYear) {
      ++s.excluded_out_of_range;
      continue;
    }
    for (const auto& tag : r.components) {
      const std::size_t c = lex.index_of(tag);
      if (c < lex.size()) ++s.counts[c][static_cast<std::size_t>(*r.year - kSeriesFirstYear)];
    }
  }
  return s;
}

double ContingencyTable::total() const {
  double t = 0.0;
  for (const auto& row : observed) {
    for (double v : row) t += v;
  }
  return t;
}

std::vector<double> ContingencyTable::row_sums() const {
  std::vector<double> out;
  for (const auto& row : observed) {
    double s = 0.0;
    for (double v : row) s += v;
    out.push_back(s);
  }
  return out;
}

std::vector<double> ContingencyTable::col_sums() const {
  std::vector<double> out(cols.size(), 0.0);
  for (const auto& row : observed) {
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
  }
  return out;
}

ContingencyBuild contingency(const std::vector<DefinitionRecord>& records,
                             const ComponentLexicon& lex) {
  ContingencyBuild b;
  b.table.rows = lex.names();
  for (Domain d : kAnalysisDomains) b.table.cols.emplace_back(to_string(d));
  b.table.observed.assign(lex.size(), std::vector<double>(b.table.cols.size(), 0.0));
  for (const auto& r : records) {
    const auto col = std::find(std::begin(kAnalysisDomains), std::end(kAnalysisDomains), r.domain);
    if (col == std::end(kAnalysisDomains)) {
      ++b.excluded_other;
      continue;
    }
    const auto j = static_cast<std::size_t>(col - std::begin(kAnalysisDomains));
    for (const auto& tag : r.components) {
      const std::size_t i = lex.index_of(tag);
      if (i < lex.size()) b.table.observed[i][j] += 1.0;
    }
  }
  if (b.table.total() <= 0.0) throw DataError("contingency table is empty");
  return b;
}

nlohmann::json to_json(const DefinitionRecord& r) {
  return {{"id", r.id},
          {"doc_id", r.doc_id},
          {"sentence", r.sentence},
          {"year", r.year ? nlohmann::json(*r.year) : nlohmann::json(nullptr)},
          {"domain", to_string(r.domain)},
          {"components", r.components}};
}

DefinitionRecord record_from_json(const nlohmann::json& j) {
  DefinitionRecord r;
  try {
    r.doc_id = j.at("doc_id").get<std::string>();
    r.sentence = j.at("sentence").get<std::string>();
    r.id = j.contains("id") ? j["id"].get<std::string>()
                            : r.doc_id + "@" + std::to_string(j.at("start").get<std::size_t>());
    if (j.contains("year") && !j["year"].is_null()) r.year = j["year"].get<int>();
    auto dom = parse_domain(j.value("domain", std::string("other")));
    if (!dom) throw DataError("unknown domain in definition record");
    r.domain = *dom;
    if (j.contains("components")) r.components = j["components"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed definition record: ") + e.what());
  }
  return r;
}

}  // namespace defminer
