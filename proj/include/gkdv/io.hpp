#pragma once

// CSV and JSON artifacts. Floats are written with 17 significant digits and
// '.' as the decimal separator, independent of the locale.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace gkdv {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string format_double(double v);

/// Header row, then one line per row. Throws ConfigError on ragged rows.
void write_csv(std::ostream& os, const Table& t);
std::string to_csv(const Table& t);

/// Inverse of write_csv. Throws IoError on malformed input.
Table read_csv(std::istream& is);

/// Two-space indented, trailing newline.
std::string to_json_text(const Json& j);

/// Writes the whole text to path; "-" means the given stream. Throws IoError.
void write_text(const std::string& path, const std::string& text, std::ostream& fallback);

}  // namespace gkdv
