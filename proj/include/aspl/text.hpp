#pragma once

// Number formatting and tokenizing shared by the text file formats.

#include <string>
#include <string_view>
#include <vector>

namespace aspl {

/// Shortest representation that parses back to the same double.
std::string format_number(double v);

double parse_number(std::string_view token);
long parse_integer(std::string_view token);

std::vector<std::string_view> split_words(std::string_view line);

/// Splits on '\n', dropping a trailing '\r', blank lines and '#' comments.
std::vector<std::string_view> content_lines(std::string_view text);

} // namespace aspl
