#include "defminer/filter.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "defminer/endpoint.hpp"
#include "defminer/error.hpp"
#include "defminer/vector_space.hpp"

namespace defminer {

std::string_view to_string(Completeness c) {
  return c == Completeness::complete ? "complete" : "incomplete";
}

PatternTemplate::Options pattern_options_from_json(const nlohmann::json& j,
                                                   PatternTemplate::Options base) {
  if (j.contains("term")) base.term = j["term"].get<std::string>();
  if (j.contains("plural")) base.plural = j["plural"].get<bool>();
  if (j.contains("copulas")) base.copulas = j["copulas"].get<std::vector<std::string>>();
  if (j.contains("markers")) base.markers = j["markers"].get<std::vector<std::string>>();
  if (j.contains("extra_patterns")) {
    base.extra_patterns = j["extra_patterns"].get<std::vector<std::string>>();
  }
  return base;
}

FilterRules filter_rules_from_json(const nlohmann::json& j) {
  FilterRules r;
  try {
    if (j.contains("min_content_tokens")) r.min_content_tokens = j["min_content_tokens"].get<std::size_t>();
    if (j.contains("buzz_phrases")) r.buzz_phrases = j["buzz_phrases"].get<std::vector<std::string>>();
    if (j.contains("pattern")) r.pattern = PatternTemplate(pattern_options_from_json(j["pattern"]));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed filter rules: ") + e.what());
  }
  return r;
}

FilterRules load_filter_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open filter rules " + path.string());
  try {
    return filter_rules_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("malformed filter rules " + path.string() + ": " + e.what());
  }
}

std::string definition_tail(const DefinitionCandidate& c, const PatternTemplate& pattern) {
  auto m = pattern.match(c.sentence);
  if (!m) return c.sentence;
  return c.sentence.substr(m->tail_start);
}

namespace {

const TokenizerOptions kAllWords{.drop_stopwords = false, .min_length = 1};

bool contains_phrase(const std::vector<std::string>& words, const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > words.size()) return false;
  return std::search(words.begin(), words.end(), phrase.begin(), phrase.end()) != words.end();
}

}  // namespace

FilterVerdict heuristic_filter(const DefinitionCandidate& c, const FilterRules& rules) {
  FilterVerdict v;
  v.candidate_id = c.id();
  v.confidence = 1.0;
  const std::string tail = definition_tail(c, rules.pattern);
  const auto content = tokenize(tail);
  const auto words = tokenize(tail, kAllWords);

  if (content.empty()) {
    v.label = Completeness::incomplete;
    v.rule = "no_content";
    return v;
  }
  for (const auto& phrase : rules.buzz_phrases) {
    if (contains_phrase(words, tokenize(phrase, kAllWords))) {
      v.label = Completeness::incomplete;
      v.rule = "buzz_phrase";
      return v;
    }
  }
  if (content.size() < rules.min_content_tokens) {
    v.label = Completeness::incomplete;
    v.rule = "short_tail";
    return v;
  }
  v.label = Completeness::complete;
  v.rule = "pass";
  return v;
}

FilterVerdict classify_external(const DefinitionCandidate& c, const ClassifierEndpoint& ep,
                                const FilterRules& rules) {
  if (!ep.enabled) return heuristic_filter(c, rules);

  std::string prompt = ep.prompt_template;
  if (auto pos = prompt.find("{sentence}"); pos != std::string::npos) {
    prompt.replace(pos, 10, c.sentence);
  }
  nlohmann::json body = {
      {"text", c.sentence}, {"task", "definition_completeness"}, {"prompt", prompt}};
  try {
    const nlohmann::json reply = post_json(ep.url, body, ep.timeout);
    const std::string label = reply.at("label").get<std::string>();
    const double confidence = reply.at("confidence").get<double>();
    if (label != "complete" && label != "incomplete") {
      throw EndpointError("classifier returned unknown label '" + label + "'");
    }
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
      throw EndpointError("classifier confidence outside [0, 1]");
    }
    FilterVerdict v;
    v.candidate_id = c.id();
    v.label = label == "complete" ? Completeness::complete : Completeness::incomplete;
    v.rule = "external";
    v.confidence = confidence;
    return v;
  } catch (const std::exception& e) {
    if (!ep.allow_fallback) throw EndpointError(e.what());
    spdlog::warn("classifier failed for {} ({}); using heuristics", c.id(), e.what());
    FilterVerdict v = heuristic_filter(c, rules);
    v.rule = "fallback";
    return v;
  }
}

std::vector<FilterVerdict> classify_all(const std::vector<DefinitionCandidate>& cands,
                                        const ClassifierEndpoint& ep, const FilterRules& rules) {
  std::vector<FilterVerdict> out(cands.size());
  if (!ep.enabled || cands.empty()) {
    for (std::size_t i = 0; i < cands.size(); ++i) out[i] = heuristic_filter(cands[i], rules);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cands.size(); i = next++) {
      try {
        out[i] = classify_external(cands[i], ep, rules);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::clamp<std::size_t>(ep.max_in_flight, 1, cands.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

FilterOutcome apply_filter(const std::vector<DefinitionCandidate>& cands,
                           const std::vector<FilterVerdict>& verdicts) {
  std::map<std::string, const FilterVerdict*> by_id;
  for (const auto& v : verdicts) {
    if (!by_id.emplace(v.candidate_id, &v).second) {
      throw DataError("duplicate verdict for candidate " + v.candidate_id);
    }
  }
  FilterOutcome out;
  for (const auto& c : cands) {
    auto it = by_id.find(c.id());
    if (it == by_id.end()) throw DataError("missing verdict for candidate " + c.id());
    ++out.audit[it->second->rule];
    if (it->second->label == Completeness::complete) {
      out.kept.push_back(c);
    } else {
      out.dropped.push_back(c);
    }
  }
  return out;
}

nlohmann::json to_json(const FilterVerdict& v) {
  return {{"candidate_id", v.candidate_id},
          {"label", to_string(v.label)},
          {"rule", v.rule},
          {"confidence", v.confidence}};
}

}  // namespace defminer
