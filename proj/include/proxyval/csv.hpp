#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace proxyval {

// Line-oriented CSV: comma delimiter, optional double-quote quoting with ""
// escapes, \n or \r\n endings. Embedded newlines inside quoted fields are not
// supported (none of the file schemas need them).
class CsvReader {
public:
  explicit CsvReader(const std::string& path);  // throws Error if unreadable

  // Parses the next data row into fields; false at end of input.
  bool next(std::vector<std::string>& fields);
  std::size_t line() const { return line_; }

private:
  std::ifstream in_;
  std::string buf_;
  std::size_t line_ = 0;
};

void split_csv_line(std::string_view line, std::vector<std::string>& fields);

std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

}  // namespace proxyval
