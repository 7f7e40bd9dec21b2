#include "guirec/csv.hpp"

#include "guirec/errors.hpp"

namespace guirec::csv {

std::optional<Record> Reader::next() {
  int c = in_.get();
  if (c == std::char_traits<char>::eof()) return std::nullopt;

  Record record;
  record.line = line_;
  std::string field;
  bool quoted = false;      // inside a quoted section
  bool was_quoted = false;  // current field started with a quote

  auto finish_field = [&] {
    record.fields.push_back(std::move(field));
    field.clear();
    was_quoted = false;
  };

  for (; c != std::char_traits<char>::eof(); c = in_.get()) {
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      if (!field.empty() || was_quoted) {
        throw ParseError("unexpected quote inside unquoted field", line_);
      }
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      finish_field();
    } else if (ch == '\r' && in_.peek() == '\n') {
      // CR of a CRLF terminator; the LF ends the record.
    } else if (ch == '\n') {
      ++line_;
      finish_field();
      return record;
    } else {
      if (was_quoted) throw ParseError("characters after closing quote", line_);
      field.push_back(ch);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", record.line);
  finish_field();
  return record;
}

void Reader::expect_header(const std::vector<std::string_view>& expected) {
  auto header = next();
  if (!header) throw ParseError("missing header row", 1);
  bool match = header->fields.size() == expected.size();
  for (std::size_t i = 0; match && i < expected.size(); ++i) {
    match = header->fields[i] == expected[i];
  }
  if (!match) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) want += ',';
      want += expected[i];
    }
    throw ParseError("unexpected header, expected '" + want + "'", header->line);
  }
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace guirec::csv
