#include "doctest.h"
#include "defminer/text.hpp"

using namespace defminer;

TEST_CASE("normalize composes to NFC") {
  // "e" + combining acute vs precomposed U+00E9
  CHECK(text::normalize("caf\x65\xCC\x81") == "caf\xC3\xA9");
}

TEST_CASE("normalize strips control characters and collapses whitespace") {
  CHECK(text::normalize("  a\t\tb \x01 c  ") == "a b c");
  CHECK(text::normalize("line one  \n\n  line two") == "line one\nline two");
  CHECK(text::normalize("") == "");
}

TEST_CASE("normalize is idempotent") {
  for (const char* s : {"  Digital\tTwin\n\n is  ", "x\r\ny", "caf\x65\xCC\x81  \x7f z"}) {
    const auto once = text::normalize(s);
    CHECK(text::normalize(once) == once);
  }
}

TEST_CASE("casefold handles non-ASCII") {
  CHECK(text::casefold("Digital TWIN") == "digital twin");
  CHECK(text::casefold("Stra\xC3\x9F" "e") == "strasse");
}

TEST_CASE("dedup_key ignores case and whitespace layout") {
  CHECK(text::dedup_key("Digital  Twin\nis") == text::dedup_key("digital twin is"));
  CHECK(text::collapse_whitespace("  a \n b ") == "a b");
}

TEST_CASE("utf8 round trip") {
  const std::string s = "r\xC3\xA9sum\xC3\xA9 \xE2\x80\x94 \xF0\x9F\x98\x80";
  const auto u = text::to_u32(s);
  CHECK(u.size() == 10);
  CHECK(text::to_utf8(u) == s);
  CHECK(text::to_u32("\xFF") == std::u32string(1, U'�'));
}
