#pragma once

#include "abxeval/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace abxeval {

// Locale-independent number formatting/parsing. Deltas and all report values
// are printed with 12 significant digits.
std::string format_double(double v, int significant_digits = 12);
double parse_double(std::string_view field, const std::string& context);
long parse_long(std::string_view field, const std::string& context);

std::vector<std::string> split_fields(const std::string& line, char sep = ',');
std::string join_fields(const std::vector<std::string>& fields, char sep = ',');

struct CsvFile {
  std::filesystem::path path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<long> line_numbers;  // 1-based source line of each row

  std::string context(std::size_t row) const;  // "file:line" for error messages
};

// Strict reader: the header must equal expected_header exactly and every row
// must have the same field count. Fields are not quoted in any of our formats.
CsvFile read_csv(const std::filesystem::path& path,
                 const std::vector<std::string>& expected_header);

void write_lines(const std::filesystem::path& path,
                 const std::vector<std::string>& lines);

}  // namespace abxeval
