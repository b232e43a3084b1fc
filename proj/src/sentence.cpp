#include "defminer/sentence.hpp"

#include <array>
#include <unordered_map>

#include "defminer/error.hpp"
#include "defminer/text.hpp"

namespace defminer {

namespace {

constexpr std::array<std::string_view, 5> kAbbreviations = {"e.g.", "i.e.", "fig.", "vs.",
                                                            "al."};

bool is_ws(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }

bool ends_with_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && !is_ws(text[begin - 1])) --begin;
  std::string_view token = text.substr(begin, dot + 1 - begin);
  while (!token.empty() && (token.front() == '(' || token.front() == '[' ||
                            token.front() == '"' || token.front() == '\'')) {
    token.remove_prefix(1);
  }
  const std::string lower = text::ascii_lower(token);
  for (std::string_view abbr : kAbbreviations) {
    if (lower != abbr) continue;
    if (abbr != "al.") return true;
    // "al." only counts as part of "et al."
    std::size_t p = begin;
    while (p > 0 && is_ws(text[p - 1])) --p;
    return p >= 2 && text::ascii_lower(text.substr(p - 2, 2)) == "et" &&
           (p == 2 || is_ws(text[p - 3]));
  }
  return false;
}

std::string escape_regex(std::string_view s) {
  static constexpr std::string_view special = R"(\^$.|?*+()[]{}/)";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string_view::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

/// Words separated by arbitrary whitespace.
std::string phrase_regex(std::string_view phrase) {
  std::string out;
  std::size_t i = 0;
  bool first = true;
  while (i < phrase.size()) {
    while (i < phrase.size() && is_ws(phrase[i])) ++i;
    std::size_t j = i;
    while (j < phrase.size() && !is_ws(phrase[j])) ++j;
    if (j > i) {
      if (!first) out += "\\s+";
      out += escape_regex(phrase.substr(i, j - i));
      first = false;
    }
    i = j;
  }
  return out;
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> out;
  std::size_t start = std::string_view::npos;
  auto emit = [&](std::size_t end) {
    if (start == std::string_view::npos) return;
    while (end > start && is_ws(text[end - 1])) --end;
    if (end > start) out.push_back({std::string(text.substr(start, end - start)), {start, end}});
    start = std::string_view::npos;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      emit(i);
      continue;
    }
    if (start == std::string_view::npos) {
      if (is_ws(c)) continue;
      start = i;
    }
    if ((c == '.' || c == '?' || c == '!') && (i + 1 == text.size() || is_ws(text[i + 1]))) {
      if (c == '.' && ends_with_abbreviation(text, i)) continue;
      emit(i + 1);
    }
  }
  emit(text.size());
  return out;
}

PatternTemplate::PatternTemplate() : PatternTemplate(Options{}) {}

PatternTemplate::PatternTemplate(Options opts) : opts_(std::move(opts)) {
  if (opts_.term.find_first_not_of(" \t\n") == std::string::npos) {
    throw UsageError("pattern term must be non-empty");
  }
  if (opts_.copulas.empty()) throw UsageError("pattern needs at least one copula");

  std::string t = opts_.term;
  t.erase(t.find_last_not_of(" \t\n") + 1);
  const bool y_plural = opts_.plural && t.size() >= 2 && t.back() == 'y' &&
                        std::string_view("aeiou").find(t[t.size() - 2]) == std::string_view::npos;
  std::string term;
  if (y_plural) {
    // "city" -> "city|cities"
    term = "\\b(?:" + phrase_regex(t.substr(0, t.size() - 1)) + "(?:y|ies))\\b";
  } else {
    term = "\\b(?:" + phrase_regex(t) + ")" + (opts_.plural ? "(?:s)?" : "") + "\\b";
  }

  std::string copulas;
  for (const auto& c : opts_.copulas) {
    if (!copulas.empty()) copulas += "|";
    copulas += phrase_regex(c);
  }
  copulas = "(?:" + copulas + ")";

  const auto flags = std::regex::ECMAScript | std::regex::icase;
  bool bare = false;
  for (const auto& marker : opts_.markers) {
    if (marker.find_first_not_of(" \t") == std::string::npos) {
      bare = true;
      continue;
    }
    std::string src =
        term + "\\s+(?:" + copulas + "\\s+)?(?:" + phrase_regex(marker) + ")\\b";
    sources_.push_back(src);
    patterns_.push_back({marker, std::regex(src, flags)});
  }
  if (bare) {
    std::string src = term + "\\s+" + copulas + "\\b(?=\\s+\\S)";
    sources_.push_back(src);
    patterns_.push_back({"", std::regex(src, flags)});
  }
  for (const auto& extra : opts_.extra_patterns) {
    try {
      patterns_.push_back({"custom", std::regex(extra, flags)});
    } catch (const std::regex_error& e) {
      throw UsageError("invalid extra pattern '" + extra + "': " + e.what());
    }
    sources_.push_back(extra);
  }
}

std::optional<PatternTemplate::Match> PatternTemplate::match(std::string_view sentence) const {
  for (const auto& p : patterns_) {
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_search(sentence.begin(), sentence.end(), m, p.re)) {
      return Match{p.marker, static_cast<std::size_t>(m.position(0) + m.length(0))};
    }
  }
  return std::nullopt;
}

std::vector<DefinitionCandidate> extract_candidates(const Document& doc,
                                                    const PatternTemplate& tmpl) {
  std::vector<DefinitionCandidate> out;
  for (auto& s : split_sentences(doc.text)) {
    auto m = tmpl.match(s.text);
    if (!m) continue;
    DefinitionCandidate c;
    c.doc_id = doc.id;
    c.sentence = std::move(s.text);
    c.span = s.span;
    c.marker = m->marker;
    c.year = doc.year;
    c.domain = doc.domain;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<DefinitionCandidate> extract_all(const std::vector<Document>& docs,
                                             const PatternTemplate& tmpl) {
  std::vector<DefinitionCandidate> out;
  for (const auto& d : docs) {
    auto part = extract_candidates(d, tmpl);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<DefinitionCandidate> dedup_exact(const std::vector<DefinitionCandidate>& cands) {
  std::vector<DefinitionCandidate> out;
  std::unordered_map<std::string, std::size_t> first;
  for (const auto& c : cands) {
    auto [it, inserted] = first.emplace(text::dedup_key(c.sentence), out.size());
    if (inserted) {
      out.push_back(c);
    } else {
      out[it->second].multiplicity += c.multiplicity;
    }
  }
  return out;
}

nlohmann::json to_json(const DefinitionCandidate& c) {
  nlohmann::json j;
  j["id"] = c.id();
  j["doc_id"] = c.doc_id;
  j["sentence"] = c.sentence;
  j["start"] = c.span.start;
  j["end"] = c.span.end;
  j["marker"] = c.marker;
  j["year"] = c.year ? nlohmann::json(*c.year) : nlohmann::json(nullptr);
  j["domain"] = to_string(c.domain);
  j["multiplicity"] = c.multiplicity;
  return j;
}

DefinitionCandidate candidate_from_json(const nlohmann::json& j) {
  DefinitionCandidate c;
  try {
    c.doc_id = j.at("doc_id").get<std::string>();
    c.sentence = j.at("sentence").get<std::string>();
    c.span = {j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()};
    c.marker = j.value("marker", std::string{});
    if (j.contains("year") && !j["year"].is_null()) c.year = j["year"].get<int>();
    auto dom = parse_domain(j.value("domain", std::string("other")));
    if (!dom) throw DataError("unknown domain in candidate record");
    c.domain = *dom;
    c.multiplicity = j.value("multiplicity", std::size_t{1});
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed candidate record: ") + e.what());
  }
  if (c.span.end < c.span.start) throw DataError("candidate span end precedes start");
  return c;
}

}  // namespace defminer
