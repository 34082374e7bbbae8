#include "collgram/format.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "collgram/error.hpp"

namespace collgram {

std::string format_fixed6(double value) {
  // glibc printf rounds the exact binary value, ties to even.
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s(buf);
  if (s == "-0.000000") s.erase(0, 1);
  return s;
}

std::string format_fixed6(const std::optional<double>& value) { return value ? format_fixed6(*value) : std::string{}; }

std::string format_p_value(double p) {
  if (std::isnan(p)) return {};
  if (p > 0.0 && p < 1e-4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", p);
    return buf;
  }
  return format_fixed6(p);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace collgram
