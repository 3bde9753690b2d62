#include "gkdv/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "gkdv/errors.hpp"

namespace gkdv {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size())
      throw ConfigError(fmt::format("CSV row has {} fields, header has {}", row.size(), t.header.size()));
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += ',';
      line += format_double(row[i]);
    }
    line += '\n';
    os << line;
  }
}

std::string to_csv(const Table& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IoError(fmt::format("line {}: '{}' is not a number", line, s));
  return v;
}

}  // namespace

Table read_csv(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw IoError("CSV input is empty");
  t.header = split(line);
  std::size_t n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != t.header.size())
      throw IoError(fmt::format("line {}: {} fields, header has {}", n, fields.size(), t.header.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, n));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string to_json_text(const Json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace gkdv
