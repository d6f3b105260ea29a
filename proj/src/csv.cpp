#include "rpys/csv.hpp"

#include "rpys/error.hpp"

namespace rpys::csv {

std::vector<Row> read(std::string_view text) {
  std::vector<Row> rows;
  std::size_t i = 0;
  std::size_t line = 1;
  while (i < text.size()) {
    Row row;
    row.line = line;
    const std::size_t row_start = i;
    std::string cell;
    bool done = false;
    while (!done) {
      if (i < text.size() && text[i] == '"') {
        ++i;
        for (;;) {
          if (i >= text.size()) {
            row.unterminated = true;
            break;
          }
          const char c = text[i];
          if (c == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              cell.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (c == '\n') ++line;
          cell.push_back(c);
          ++i;
        }
      }
      // unquoted remainder (also tolerates stray bytes after a closing quote)
      while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') cell.push_back(text[i++]);
      row.cells.push_back(std::move(cell));
      cell.clear();
      if (i >= text.size()) {
        row.bytes = text.substr(row_start, i - row_start);
        done = true;
      } else if (text[i] == ',') {
        ++i;
      } else {
        row.bytes = text.substr(row_start, i - row_start);
        if (text[i] == '\r') ++i;
        if (i < text.size() && text[i] == '\n') ++i;
        ++line;
        done = true;
      }
    }
    // blank lines carry no record
    if (!(row.cells.size() == 1 && row.cells[0].empty())) rows.push_back(std::move(row));
  }
  return rows;
}

std::string escape(std::string_view cell) {
  if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
  std::string out;
  out.reserve(cell.size() + 2);
  out.push_back('"');
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::size_t write_row(std::ostream& out, const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) line.push_back(',');
    line += escape(cells[i]);
  }
  line.push_back('\n');
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed");
  return line.size();
}

}  // namespace rpys::csv
