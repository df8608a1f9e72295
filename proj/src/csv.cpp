#include "abxeval/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

namespace abxeval {

std::string format_double(double v, int significant_digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general,
                           significant_digits);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, const std::string& context) {
  double v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ParseError(context + ": '" + std::string(field) + "' is not a number");
  }
  return v;
}

long parse_long(std::string_view field, const std::string& context) {
  long v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ParseError(context + ": '" + std::string(field) + "' is not an integer");
  }
  return v;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string join_fields(const std::vector<std::string>& fields, char sep) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += sep;
    out += fields[i];
  }
  return out;
}

std::string CsvFile::context(std::size_t row) const {
  return path.string() + ":" + std::to_string(line_numbers.at(row));
}

CsvFile read_csv(const std::filesystem::path& path,
                 const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");

  CsvFile file;
  file.path = path;
  std::string line;
  long line_no = 0;

  if (!std::getline(in, line)) {
    throw ParseError(path.string() + ": empty file, expected header '" +
                     join_fields(expected_header) + "'");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  file.header = split_fields(line);
  if (file.header != expected_header) {
    throw ParseError(path.string() + ": bad header '" + line + "', expected '" +
                     join_fields(expected_header) + "'");
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != expected_header.size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(expected_header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    file.rows.push_back(std::move(fields));
    file.line_numbers.push_back(line_no);
  }
  return file;
}

void write_lines(const std::filesystem::path& path,
                 const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);  // binary: no CRLF translation anywhere
  if (!out) throw Error("cannot write '" + path.string() + "'");
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace abxeval
