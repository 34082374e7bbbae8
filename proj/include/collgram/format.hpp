#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace collgram {

// Six decimals, correctly rounded with ties to even.
std::string format_fixed6(double value);
std::string format_fixed6(const std::optional<double>& value);

// Fixed six decimals, or scientific notation below 1e-4 (zero excluded).
std::string format_p_value(double p);

// Splits one CSV record on commas. Quoted fields are not supported: none
// of the toolkit's formats produce them.
std::vector<std::string_view> split_csv(std::string_view line);

// Splits text into lines, dropping '\r' before '\n' and a final empty line.
std::vector<std::string_view> split_lines(std::string_view text);

std::string read_text_file(const std::string& path);

}  // namespace collgram
