#include "defminer/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "defminer/error.hpp"
#include "defminer/text.hpp"

namespace defminer {

using nlohmann::json;

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::building: return "building";
    case Domain::architecture: return "architecture";
    case Domain::urban: return "urban";
    case Domain::manufacturing: return "manufacturing";
    case Domain::other: return "other";
  }
  return "other";
}

std::string_view to_string(Source s) { return s == Source::survey ? "survey" : "article"; }

std::optional<Domain> parse_domain(std::string_view s) {
  const std::string v = text::ascii_lower(s);
  for (Domain d : {Domain::building, Domain::architecture, Domain::urban,
                   Domain::manufacturing, Domain::other}) {
    if (v == to_string(d)) return d;
  }
  return std::nullopt;
}

std::optional<Source> parse_source(std::string_view s) {
  const std::string v = text::ascii_lower(s);
  if (v == "article") return Source::article;
  if (v == "survey") return Source::survey;
  return std::nullopt;
}

namespace {

CorpusManifest count(const std::vector<Document>& docs) {
  CorpusManifest m;
  for (const auto& d : docs) {
    ++m.per_source[std::string(to_string(d.source))];
    ++m.per_domain[std::string(to_string(d.domain))];
    ++m.per_year[d.year ? std::to_string(*d.year) : "unknown"];
  }
  return m;
}

std::string string_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

Corpus::Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {
  std::set<std::string> seen;
  for (const auto& d : docs_) {
    if (d.id.empty()) throw DataError("document with empty id");
    if (!seen.insert(d.id).second) throw DataError("duplicate id " + d.id);
  }
  manifest_ = count(docs_);
}

CorpusManifest Corpus::recount() const { return count(docs_); }

std::vector<Document> Corpus::with_source(Source s) const {
  std::vector<Document> out;
  for (const auto& d : docs_) {
    if (d.source == s) out.push_back(d);
  }
  return out;
}

Document document_from_json(const json& j) {
  if (!j.is_object()) throw DataError("record is not a JSON object");
  Document d;
  d.id = string_field(j, "id");
  if (d.id.empty()) throw DataError("missing or empty 'id'");
  d.title = text::normalize(string_field(j, "title"));
  d.venue = text::normalize(string_field(j, "venue"));
  d.subject = text::normalize(string_field(j, "subject"));

  if (auto it = j.find("year"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw DataError("'year' must be an integer or null");
    const int y = it->get<int>();
    if (y < kMinYear || y > kMaxYear) {
      throw DataError("year " + std::to_string(y) + " outside [1900, 2100]");
    }
    d.year = y;
  }

  if (auto it = j.find("domain"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("'domain' must be a string or null");
    auto dom = parse_domain(it->get<std::string>());
    if (!dom) throw DataError("unknown domain '" + it->get<std::string>() + "'");
    d.domain = *dom;
    d.domain_origin = DomainOrigin::metadata;
  }

  if (auto it = j.find("source"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("'source' must be a string");
    auto src = parse_source(it->get<std::string>());
    if (!src) throw DataError("unknown source '" + it->get<std::string>() + "'");
    d.source = *src;
  }
  if (j.contains("domain_origin") && j["domain_origin"] == "rules") {
    d.domain_origin = DomainOrigin::rules;
  }

  d.text = text::normalize(string_field(j, "text"));
  if (d.text.empty()) throw DataError("document " + d.id + " has empty text");
  return d;
}

json to_json(const Document& d) {
  json j;
  j["id"] = d.id;
  j["title"] = d.title;
  j["year"] = d.year ? json(*d.year) : json(nullptr);
  j["venue"] = d.venue;
  j["subject"] = d.subject;
  j["domain"] = to_string(d.domain);
  j["domain_origin"] = d.domain_origin == DomainOrigin::metadata ? "metadata" : "rules";
  j["source"] = to_string(d.source);
  j["text"] = d.text;
  return j;
}

Corpus parse_corpus_jsonl(std::string_view content, std::string_view origin) {
  std::vector<Document> docs;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (nl == content.size()) break;
      continue;
    }
    // Artifact metadata header written by the pipeline.
    if (line.starts_with("{\"_meta\"")) continue;
    try {
      Document d = document_from_json(json::parse(line));
      if (!seen.insert(d.id).second) throw DataError("duplicate id " + d.id);
      docs.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw DataError(std::string(origin) + ": line " + std::to_string(line_no) +
                      ": malformed JSON: " + e.what());
    } catch (const DataError& e) {
      throw DataError(std::string(origin) + ": line " + std::to_string(line_no) + ": " +
                      e.what());
    }
    if (nl == content.size()) break;
  }
  if (docs.empty()) throw DataError(std::string(origin) + ": corpus is empty");
  return Corpus(std::move(docs));
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  if (format != CorpusFormat::jsonl) throw UsageError("unsupported corpus format");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus_jsonl(buf.str(), path.string());
}

Domain assign_domain(const Document& doc, const DomainRules& rules) {
  const std::string haystack =
      text::casefold(doc.title + "\n" + doc.subject + "\n" + doc.venue);
  for (const auto& rule : rules) {
    for (const auto& kw : rule.keywords) {
      if (kw.empty()) continue;
      if (haystack.find(text::casefold(kw)) != std::string::npos) return rule.domain;
    }
  }
  return Domain::other;
}

DomainRules domain_rules_from_json(const json& j) {
  if (!j.is_array()) throw DataError("domain rules must be a JSON array");
  DomainRules rules;
  for (const auto& r : j) {
    auto dom = parse_domain(r.at("domain").get<std::string>());
    if (!dom) throw DataError("unknown domain in rules: " + r.at("domain").get<std::string>());
    rules.push_back({*dom, r.at("keywords").get<std::vector<std::string>>()});
  }
  if (rules.empty()) throw DataError("domain rules are empty");
  return rules;
}

DomainRules load_domain_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open domain rules " + path.string());
  try {
    return domain_rules_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw DataError("malformed domain rules " + path.string() + ": " + e.what());
  }
}

Corpus apply_domain_rules(const Corpus& corpus, const DomainRules& rules) {
  std::vector<Document> docs = corpus.documents();
  for (auto& d : docs) {
    if (d.domain_origin == DomainOrigin::metadata) continue;
    d.domain = assign_domain(d, rules);
    d.domain_origin = DomainOrigin::rules;
  }
  return Corpus(std::move(docs));
}

}  // namespace defminer
