#include "defminer/artifacts.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include "defminer/error.hpp"

namespace defminer {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

nlohmann::json ArtifactHeader::to_json() const {
  return {{"tool", "defminer"}, {"version", version}, {"config_hash", config_hash}, {"seed", seed}};
}

std::string ArtifactHeader::comment_line() const {
  return fmt::format("# defminer version={} config_hash={} seed={}", version, config_hash, seed);
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing artifact " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_jsonl(const fs::path& path, const ArtifactHeader& h,
                 const std::vector<nlohmann::json>& records) {
  auto out = open_out(path);
  out << nlohmann::json{{"_meta", h.to_json()}}.dump() << '\n';
  for (const auto& r : records) out << r.dump() << '\n';
}

std::vector<nlohmann::json> read_jsonl(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      if (j.is_object() && j.contains("_meta")) continue;
      out.push_back(std::move(j));
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(path.string() + ": line " + std::to_string(n) + ": malformed JSON: " +
                      e.what());
    }
  }
  return out;
}

void write_json(const fs::path& path, const ArtifactHeader& h, nlohmann::json body) {
  body["_meta"] = h.to_json();
  auto out = open_out(path);
  out << body.dump(2) << '\n';
}

nlohmann::json read_json(const fs::path& path) {
  try {
    auto j = nlohmann::json::parse(read_file(path));
    if (j.is_object()) j.erase("_meta");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": malformed JSON: " + e.what());
  }
}

void write_csv(const fs::path& path, const ArtifactHeader& h, const std::vector<CsvRow>& rows) {
  auto out = open_out(path);
  out << h.comment_line() << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_field(row[i]);
    }
    out << '\n';
  }
}

std::vector<CsvRow> read_csv(const fs::path& path) {
  const std::string content = read_file(path);
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool at_line_start = true;
  bool comment = false;
  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (at_line_start) {
      at_line_start = false;
      comment = (c == '#');
    }
    if (comment) {
      if (c == '\n') at_line_start = true;
      continue;
    }
    if (in_quotes) {
      if (c == '"' && i + 1 < content.size() && content[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      at_line_start = true;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text(const fs::path& path, const ArtifactHeader& h, std::string_view body) {
  auto out = open_out(path);
  out << h.comment_line() << '\n' << body;
}

std::string strip_header(const fs::path& path) {
  const std::string content = read_file(path);
  if (path.extension() == ".json") {
    try {
      auto j = nlohmann::json::parse(content);
      if (j.is_object()) j.erase("_meta");
      return j.dump(2);
    } catch (const nlohmann::json::parse_error&) {
      return content;
    }
  }
  const auto nl = content.find('\n');
  const std::string_view first = std::string_view(content).substr(0, nl);
  if (first.starts_with("#") || first.starts_with("{\"_meta\"")) {
    return nl == std::string::npos ? std::string{} : content.substr(nl + 1);
  }
  return content;
}

std::string format_real(double v) {
  if (v == 0.0) return "0";
  return fmt::format("{:.10g}", v);
}

}  // namespace defminer
