#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace defminer::text {

/// Canonical text form used everywhere downstream of ingestion: Unicode NFC,
/// control characters removed, whitespace runs collapsed to a single space
/// (or a single '\n' when the run contained a line break), ends trimmed.
/// Idempotent.
std::string normalize(std::string_view raw);

/// Full Unicode case folding.
std::string casefold(std::string_view s);

/// Collapses every whitespace run (including newlines) to one space and trims.
std::string collapse_whitespace(std::string_view s);

/// casefold + collapse_whitespace; the key used for exact and fuzzy dedup.
std::string dedup_key(std::string_view s);

/// Decodes UTF-8 into Unicode scalar values. Invalid sequences decode to U+FFFD.
std::u32string to_u32(std::string_view s);
std::string to_utf8(std::u32string_view s);

/// ASCII-only lowercase; cheap and locale independent.
std::string ascii_lower(std::string_view s);

}  // namespace defminer::text
