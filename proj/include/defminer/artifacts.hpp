#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace defminer {

inline constexpr const char* kToolVersion = "0.1.0";

/// Metadata written at the top of every artifact.
struct ArtifactHeader {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = kToolVersion;

  nlohmann::json to_json() const;
  /// "# defminer version=... config_hash=... seed=..."
  std::string comment_line() const;
};

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view data);

using CsvRow = std::vector<std::string>;

/// JSONL: first line `{"_meta": {...}}`, then one record per line.
void write_jsonl(const std::filesystem::path& path, const ArtifactHeader& h,
                 const std::vector<nlohmann::json>& records);
/// Skips the `_meta` line when present.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

/// JSON object with a leading "_meta" key.
void write_json(const std::filesystem::path& path, const ArtifactHeader& h, nlohmann::json body);
/// Returns the object without "_meta".
nlohmann::json read_json(const std::filesystem::path& path);

/// CSV with a leading '#' comment line; fields quoted when needed.
void write_csv(const std::filesystem::path& path, const ArtifactHeader& h,
               const std::vector<CsvRow>& rows);
/// Parses CSV, skipping '#' comment lines. The first row returned is the
/// column header.
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const ArtifactHeader& h, std::string_view body);

/// File content with its metadata header removed (first '#' line, first
/// `_meta` JSONL line, or the "_meta" key of a JSON object).
std::string strip_header(const std::filesystem::path& path);

/// Deterministic short decimal form for reals in CSV/text outputs.
std::string format_real(double v);

std::string read_file(const std::filesystem::path& path);

}  // namespace defminer
