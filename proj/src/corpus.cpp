#include "rpys/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "rpys/csv.hpp"
#include "rpys/error.hpp"
#include "rpys/hash.hpp"
#include "rpys/text.hpp"

namespace rpys {
namespace {

std::optional<int> parse_year(std::string_view s) {
  s = text::trim(s);
  int year = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), year);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return year;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

void check_utf8(std::string_view bytes) {
  if (!text::is_valid_utf8(bytes)) throw Error(ErrorCode::Encoding, "input is not valid UTF-8");
}

bool is_tag_line(std::string_view line) {
  auto tag_char = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); };
  return line.size() >= 2 && tag_char(line[0]) && tag_char(line[1]) && (line.size() == 2 || line[2] == ' ');
}

bool is_continuation(std::string_view line) {
  return line.size() >= 3 && line.substr(0, 3) == "   " && (line.size() == 3 || line[3] != ' ');
}

struct WosRecord {
  std::size_t first_line = 0;
  const char* begin = nullptr;
  const char* end = nullptr;
  std::map<std::string, std::vector<std::string>, std::less<>> fields;
  std::string current_tag;
  std::optional<std::string> error;

  void add(std::string_view tag, std::string_view content) {
    content = text::trim(content);
    if (content.empty()) return;
    fields[std::string(tag)].emplace_back(content);
  }

  const std::vector<std::string>* get(std::string_view tag) const {
    auto it = fields.find(tag);
    return it == fields.end() ? nullptr : &it->second;
  }
};

// Shared tail of both parsers: validates the year, assigns the content hash
// id and rejects duplicates.
class CorpusBuilder {
 public:
  explicit CorpusBuilder(CorpusFormat format) { corpus_.format = format; }

  void reject(std::size_t line, std::string message) {
    corpus_.diagnostics.push_back({line, std::move(message)});
  }

  void accept(std::size_t line, std::string_view record_bytes, Publication pub,
              std::optional<int> year, const std::vector<std::string>& refs) {
    if (!year) {
      reject(line, "record has no parseable publication year");
      return;
    }
    if (!is_plausible_year(*year)) {
      reject(line, "publication year " + std::to_string(*year) + " outside [1500, 2100]");
      return;
    }
    pub.pub_year = *year;
    pub.id = "p" + to_hex(fnv1a(record_bytes));
    if (!ids_.insert(pub.id).second) {
      reject(line, "duplicate record (identical bytes to an earlier record)");
      return;
    }
    for (const auto& r : refs) {
      std::string_view trimmed = text::trim(r);
      if (trimmed.empty()) continue;
      pub.raw_refs.push_back({std::string(trimmed), pub.id, pub.raw_refs.size()});
    }
    corpus_.publications.push_back(std::move(pub));
  }

  Corpus finish() { return std::move(corpus_); }

 private:
  Corpus corpus_;
  std::set<std::string> ids_;
};

void finalize_wos(CorpusBuilder& builder, const WosRecord& rec) {
  if (rec.error) {
    builder.reject(rec.first_line, *rec.error);
    return;
  }
  Publication pub;
  if (const auto* au = rec.get("AU")) pub.authors = *au;
  if (const auto* ti = rec.get("TI")) pub.title = join(*ti);
  if (const auto* so = rec.get("SO")) pub.source_title = join(*so);
  if (const auto* di = rec.get("DI"); di && !di->empty()) {
    std::string doi = text::normalize_doi(di->front());
    if (!doi.empty()) pub.doi = std::move(doi);
  }
  std::optional<int> year;
  if (const auto* py = rec.get("PY"); py && !py->empty()) {
    year = parse_year(py->front());
    if (!year) {
      builder.reject(rec.first_line, "unparseable PY value '" + py->front() + "'");
      return;
    }
  } else {
    builder.reject(rec.first_line, "record missing PY");
    return;
  }
  static const std::vector<std::string> kNoRefs;
  const auto* cr = rec.get("CR");
  builder.accept(rec.first_line, std::string_view(rec.begin, static_cast<std::size_t>(rec.end - rec.begin)),
                 std::move(pub), year, cr ? *cr : kNoRefs);
}

}  // namespace

std::size_t Corpus::ref_count() const {
  std::size_t n = 0;
  for (const auto& p : publications) n += p.raw_refs.size();
  return n;
}

const Publication* Corpus::find(std::string_view id) const {
  for (const auto& p : publications) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

Corpus parse_wos_export(std::string_view bytes) {
  check_utf8(bytes);
  const std::string_view body = text::strip_bom(bytes);
  CorpusBuilder builder(CorpusFormat::WosTagged);
  if (text::trim(body).empty()) return builder.finish();

  const auto lines = text::split_lines(body);
  if (std::none_of(lines.begin(), lines.end(), [](std::string_view l) { return l.starts_with("PT "); })) {
    throw Error(ErrorCode::NotWosFormat, "no 'PT ' record start line found");
  }

  std::optional<WosRecord> rec;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    const std::size_t line_no = i + 1;
    if (line.starts_with("PT ")) {
      if (rec) {
        rec->error = "record not terminated by ER";
        finalize_wos(builder, *rec);
      }
      rec.emplace();
      rec->first_line = line_no;
      rec->begin = line.data();
      rec->end = line.data() + line.size();
      rec->current_tag = "PT";
      rec->add("PT", line.substr(3));
      continue;
    }
    if (!rec) continue;  // header lines (FN, VR), EF and blanks between records
    rec->end = line.data() + line.size();
    if (text::trim(line) == "ER") {
      finalize_wos(builder, *rec);
      rec.reset();
      continue;
    }
    if (text::trim(line).empty()) continue;
    if (is_continuation(line)) {
      rec->add(rec->current_tag, line.substr(3));
    } else if (is_tag_line(line)) {
      rec->current_tag = std::string(line.substr(0, 2));
      rec->add(rec->current_tag, line.size() > 3 ? line.substr(3) : std::string_view());
    } else if (!rec->error) {
      rec->error = "malformed line " + std::to_string(line_no);
    }
  }
  if (rec) {
    rec->error = "record not terminated by ER";
    finalize_wos(builder, *rec);
  }
  return builder.finish();
}

Corpus parse_scopus_csv(std::string_view bytes) {
  check_utf8(bytes);
  const std::string_view body = text::strip_bom(bytes);
  CorpusBuilder builder(CorpusFormat::ScopusCsv);
  if (text::trim(body).empty()) return builder.finish();

  const auto rows = csv::read(body);
  const auto& header = rows.front().cells;
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (text::trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  const std::vector<std::string_view> required = {"Title", "Authors", "Year", "Source title", "DOI", "References"};
  std::vector<std::size_t> idx;
  std::string missing;
  for (auto name : required) {
    if (auto c = column(name)) {
      idx.push_back(*c);
    } else {
      missing += (missing.empty() ? "" : ", ") + std::string(name);
    }
  }
  if (!missing.empty()) throw Error(ErrorCode::NotScopusFormat, "missing Scopus header columns: " + missing);
  const std::size_t title = idx[0], authors = idx[1], year = idx[2], source = idx[3], doi = idx[4], refs = idx[5];
  const std::size_t needed = *std::max_element(idx.begin(), idx.end()) + 1;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.unterminated) {
      builder.reject(row.line, "unterminated quoted cell");
      continue;
    }
    if (row.cells.size() < needed) {
      builder.reject(row.line, "row has " + std::to_string(row.cells.size()) + " cells, expected at least " +
                                   std::to_string(needed));
      continue;
    }
    Publication pub;
    pub.title = std::string(text::trim(row.cells[title]));
    pub.source_title = std::string(text::trim(row.cells[source]));
    const std::string& author_cell = row.cells[authors];
    const std::string_view author_sep = author_cell.find(';') != std::string::npos ? ";" : ", ";
    std::string_view rest = author_cell;
    while (!rest.empty()) {
      const std::size_t pos = rest.find(author_sep);
      std::string_view a = text::trim(rest.substr(0, pos));
      if (!a.empty()) pub.authors.emplace_back(a);
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + author_sep.size());
    }
    if (std::string d = text::normalize_doi(row.cells[doi]); !d.empty()) pub.doi = std::move(d);

    std::vector<std::string> items;
    std::string_view cell = row.cells[refs];
    while (!cell.empty()) {
      const std::size_t pos = cell.find("; ");
      items.emplace_back(cell.substr(0, pos));
      if (pos == std::string_view::npos) break;
      cell.remove_prefix(pos + 2);
    }
    const auto y = parse_year(row.cells[year]);
    if (!y) {
      builder.reject(row.line, "unparseable Year '" + row.cells[year] + "'");
      continue;
    }
    builder.accept(row.line, row.bytes, std::move(pub), y, items);
  }
  return builder.finish();
}

DetectedFormat detect_format(std::string_view bytes) {
  const std::string_view body = text::strip_bom(bytes);
  const auto lines = text::split_lines(body);
  const std::size_t limit = std::min<std::size_t>(lines.size(), 100);
  for (std::size_t i = 0; i < limit; ++i) {
    if (lines[i].starts_with("PT ")) return DetectedFormat::WosTagged;
  }
  if (!lines.empty()) {
    const auto header = csv::read(lines.front());
    if (!header.empty()) {
      for (const auto& cell : header.front().cells) {
        if (text::trim(cell) == "References") return DetectedFormat::ScopusCsv;
      }
    }
  }
  return DetectedFormat::Unknown;
}

Corpus parse_corpus(std::string_view bytes, std::optional<CorpusFormat> format) {
  if (!format) {
    switch (detect_format(bytes)) {
      case DetectedFormat::WosTagged: format = CorpusFormat::WosTagged; break;
      case DetectedFormat::ScopusCsv: format = CorpusFormat::ScopusCsv; break;
      case DetectedFormat::Unknown:
        if (text::trim(text::strip_bom(bytes)).empty()) return Corpus{};
        throw Error(ErrorCode::InvalidArgument, "unrecognized input format (neither WoS tagged nor Scopus CSV)");
    }
  }
  return *format == CorpusFormat::WosTagged ? parse_wos_export(bytes) : parse_scopus_csv(bytes);
}

std::string_view to_string(CorpusFormat f) { return f == CorpusFormat::WosTagged ? "wos" : "scopus"; }

std::optional<CorpusFormat> corpus_format_from_string(std::string_view s) {
  if (s == "wos") return CorpusFormat::WosTagged;
  if (s == "scopus") return CorpusFormat::ScopusCsv;
  return std::nullopt;
}

}  // namespace rpys
