#include <string>

#include "doctest.h"
#include "defminer/corpus.hpp"
#include "defminer/error.hpp"

using namespace defminer;

namespace {

const char* kTwo =
    R"({"id":"a","title":"Twins in BIM","year":2020,"venue":"V","subject":"s","domain":null,"source":"article","text":"Digital twin is x."})"
    "\n"
    R"({"id":"b","title":"T","year":null,"venue":"Urban Studies","subject":"","domain":"manufacturing","source":"survey","text":"  y  \n z"})"
    "\n";

std::string message_of(const std::string& content) {
  try {
    parse_corpus_jsonl(content, "c.jsonl");
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse keeps order and normalizes text") {
  const auto c = parse_corpus_jsonl(kTwo);
  REQUIRE(c.size() == 2);
  CHECK(c.documents()[0].id == "a");
  CHECK(c.documents()[1].text == "y\nz");
  CHECK(c.documents()[1].source == Source::survey);
  CHECK_FALSE(c.documents()[1].year.has_value());
  CHECK(c.documents()[1].domain_origin == DomainOrigin::metadata);
}

TEST_CASE("manifest counts equal a recount") {
  const auto c = parse_corpus_jsonl(kTwo);
  CHECK(c.manifest() == c.recount());
  CHECK(c.manifest().per_source.at("article") == 1);
  CHECK(c.manifest().per_year.at("unknown") == 1);
  CHECK(c.manifest().per_year.at("2020") == 1);
}

TEST_CASE("malformed line reports its line number") {
  const std::string bad = std::string(kTwo) + "{not json}\n";
  CHECK(message_of(bad).find("line 3") != std::string::npos);
}

TEST_CASE("duplicate ids, bad years and empty input are data errors") {
  const std::string dup =
      R"({"id":"a","title":"","venue":"","subject":"","text":"t"})"
      "\n"
      R"({"id":"a","title":"","venue":"","subject":"","text":"u"})";
  CHECK(message_of(dup).find("duplicate id a") != std::string::npos);
  CHECK(message_of(R"({"id":"a","year":1850,"text":"t"})").find("1900") != std::string::npos);
  CHECK(message_of("\n\n").find("empty") != std::string::npos);
  CHECK(message_of(R"({"id":"a","domain":"space","text":"t"})").find("space") != std::string::npos);
}

TEST_CASE("domain rules: first match wins, metadata domains untouched") {
  const DomainRules rules = {{Domain::building, {"bim"}}, {Domain::urban, {"urban"}}};
  const auto c = apply_domain_rules(parse_corpus_jsonl(kTwo), rules);
  CHECK(c.documents()[0].domain == Domain::building);
  CHECK(c.documents()[0].domain_origin == DomainOrigin::rules);
  CHECK(c.documents()[1].domain == Domain::manufacturing);

  Document none;
  none.title = "nothing relevant";
  CHECK(assign_domain(none, rules) == Domain::other);
}

TEST_CASE("document json round trip") {
  const auto c = parse_corpus_jsonl(kTwo);
  for (const auto& d : c.documents()) CHECK(document_from_json(to_json(d)) == d);
}

TEST_CASE("corpus file loads from the shipped fixture") {
  const auto c = load_corpus(std::string(DEFMINER_DATA_DIR) + "/fixture/corpus.jsonl");
  CHECK(c.size() == 30);
  CHECK(c.with_source(Source::survey).size() == 3);
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), DataError);
}
