#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pirm::csv {

/// Shortest round-trip decimal form (at most 17 significant digits), always
/// with '.' as the separator regardless of the global locale.
std::string format_number(double value);

/// Strict full-string parse; throws std::domain_error on anything else.
double parse_number(std::string_view text);

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view text);

/// Reads a CSV whose first line must equal `header` exactly (after trimming
/// trailing CR/whitespace). Returns the data rows split into fields; every
/// row must have as many fields as the header.
std::vector<std::vector<std::string>> read_table(std::istream& in, std::string_view header);

}  // namespace pirm::csv
