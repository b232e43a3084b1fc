#include <random>

#include "doctest.h"
#include "defminer/dedup.hpp"
#include "defminer/error.hpp"
#include "defminer/text.hpp"
#include "oracles.hpp"

using namespace defminer;

namespace {

DefinitionCandidate cand(std::string doc, std::string sentence) {
  DefinitionCandidate c;
  c.doc_id = std::move(doc);
  c.sentence = std::move(sentence);
  c.span = {0, c.sentence.size()};
  return c;
}

const char* kConsortium =
    "Digital Twin is a virtual representation of real-world entities and processes, synchronized at a "
    "specified frequency and fidelity.";
const char* kReplica =
    "Digital Twin is a digital replica of real-world entities and processes, synchronized at a specified "
    "frequency and fidelity.";

}  // namespace

TEST_CASE("levenshtein hand cases") {
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("abc", "abc") == 0);
  // scalar values, not bytes
  CHECK(levenshtein("café", "cafe") == 1);
}

TEST_CASE("levenshtein equals the recursive oracle on short strings") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> len(0, 6), ch(0, 2);
  auto word = [&] {
    std::u32string s(static_cast<std::size_t>(len(rng)), U'a');
    for (auto& c : s) c = static_cast<char32_t>(U'a' + ch(rng));
    return s;
  };
  for (int i = 0; i < 2000; ++i) {
    const auto a = word(), b = word();
    CHECK(levenshtein(a, b) == oracle::levenshtein(a, b));
  }
}

TEST_CASE("fuzzy match values") {
  CHECK(fuzzy_match("abc", "abd") == doctest::Approx(2.0 / 3.0));
  CHECK(fuzzy_match("", "") == 1.0);
  CHECK(fuzzy_match("Digital  TWIN", "digital twin") == 1.0);
  CHECK(fuzzy_match("Digital  TWIN", "digital twin", FuzzyMode::raw) < 1.0);
  const double s = fuzzy_match(kConsortium, kReplica);
  const auto ka = text::to_u32(text::dedup_key(kConsortium));
  const auto kb = text::to_u32(text::dedup_key(kReplica));
  const double want = 1.0 - static_cast<double>(oracle::levenshtein(ka, kb)) /
                                static_cast<double>(std::max(ka.size(), kb.size()));
  CHECK(s == doctest::Approx(want).epsilon(1e-12));
  CHECK(s < 0.90);
  CHECK(s == fuzzy_match(kReplica, kConsortium));
}

TEST_CASE("cluster dedup keeps the earliest member") {
  const std::vector<DefinitionCandidate> m = {cand("a", "Digital twin is a model of the asset."),
                                              cand("b", "Digital twin is a model of the assets."),
                                              cand("c", "Something completely different here.")};
  const auto r = dedup_cluster(m, 0.9, 4);
  REQUIRE(r.survivors.size() == 2);
  CHECK(r.survivors[0].doc_id == "a");
  CHECK(r.survivors[1].doc_id == "c");
  REQUIRE(r.decisions.size() == 1);
  CHECK(r.decisions[0].kept_id == "a@0");
  CHECK(r.decisions[0].dropped_id == "b@0");
  CHECK(r.decisions[0].cluster == 4);
  CHECK(r.decisions[0].score >= 0.9);
}

TEST_CASE("threshold is inclusive and validated") {
  const std::vector<DefinitionCandidate> m = {cand("a", "abc"), cand("b", "abd")};
  CHECK(dedup_cluster(m, 2.0 / 3.0).survivors.size() == 1);
  CHECK(dedup_cluster(m, 0.67).survivors.size() == 2);
  CHECK_THROWS_AS(dedup_cluster(m, 0.0), UsageError);
  CHECK_THROWS_AS(dedup_cluster(m, 1.5), UsageError);
}

TEST_CASE("near duplicates in different clusters are only reported") {
  const std::vector<DefinitionCandidate> cs = {cand("a", "Digital twin is a model of the asset."),
                                               cand("b", "Digital twin is a model of the assets."),
                                               cand("c", "Digital twin is a model of the asset!")};
  const std::vector<std::size_t> cl = {0, 1, 0};
  const auto r = dedup_within_clusters(cs, cl, 0.9);
  REQUIRE(r.survivors.size() == 2);
  CHECK(r.survivors[0].doc_id == "a");
  CHECK(r.survivors[1].doc_id == "b");
  const auto cross = cross_cluster_duplicates(r.survivors, {0, 1}, 0.9);
  REQUIRE(cross.size() == 1);
  CHECK(cross[0].kept_id == "a@0");
  CHECK_THROWS(dedup_within_clusters(cs, {0, 1}, 0.9));
}
