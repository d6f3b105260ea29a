#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace rpys::csv {

struct Row {
  std::size_t line = 0;  // 1-based line on which the row starts
  std::string_view bytes;  // the row's raw span, without the record terminator
  std::vector<std::string> cells;
  bool unterminated = false;  // a quoted cell ran to end of input
};

// RFC 4180 reader. Quoted cells may contain separators, doubled quotes and
// line breaks. Accepts LF or CRLF terminators. An unterminated quoted cell
// swallows the rest of the input and marks its row.
std::vector<Row> read(std::string_view text);

// Quotes a cell iff it contains a comma, a double quote, CR or LF.
std::string escape(std::string_view cell);

// Writes one LF-terminated record; returns bytes written.
std::size_t write_row(std::ostream& out, const std::vector<std::string>& cells);

}  // namespace rpys::csv
