#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace conflictnet::csv {

/// Splits one comma-delimited line. Double-quoted fields may contain commas
/// and doubled quotes; surrounding whitespace outside quotes is trimmed.
std::vector<std::string> split_line(std::string_view line);

/// Quotes a field when it contains a comma, quote, or newline.
std::string escape(std::string_view field);

/// Reads the next line, stripping a trailing '\r'. Returns false at end of stream.
bool read_line(std::istream &in, std::string &line);

std::string_view trim(std::string_view text);

} // namespace conflictnet::csv
