#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace guirec::csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

// RFC-4180 reader: comma separated, double-quote quoting with "" escapes,
// quoted fields may span lines. Accepts LF and CRLF line endings.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next record, or nullopt at end of input. Throws ParseError on an
  // unterminated quote or stray characters after a closing quote.
  std::optional<Record> next();

  // Reads the header row and checks it matches `expected` exactly.
  void expect_header(const std::vector<std::string_view>& expected);

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace guirec::csv
