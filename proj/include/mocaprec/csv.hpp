#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mocaprec::csv {

// Splits one CSV record on commas. The trial/manifest formats never quote or
// embed separators, so no quote handling is needed.
std::vector<std::string> split(std::string_view line);

// Reads all lines of a text file; strips trailing '\r'. Throws Err::MissingFile.
std::vector<std::string> read_lines(const std::string& path);

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

// Parses a finite double. Empty or whitespace-only cells yield NaN (the
// missing-value sentinel). Throws Err::RaggedRow on malformed numbers.
double parse_cell(std::string_view cell, const std::string& context);

// Writes content to path via a temp file in the same directory plus rename, so
// failures never leave a partial file behind. Throws Err::IoError.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace mocaprec::csv
