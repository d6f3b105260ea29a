#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rpys {

inline constexpr int kMinYear = 1500;
inline constexpr int kMaxYear = 2100;

inline bool is_plausible_year(int year) { return year >= kMinYear && year <= kMaxYear; }

struct RawCitedRef {
  std::string raw;
  std::string citing_id;
  std::size_t position = 0;

  bool operator==(const RawCitedRef&) const = default;
};

// One citing record from the input corpus.
struct Publication {
  std::string id;  // content hash of the record's bytes
  std::string title;
  std::vector<std::string> authors;
  int pub_year = 0;
  std::string source_title;
  std::optional<std::string> doi;
  std::vector<RawCitedRef> raw_refs;

  bool operator==(const Publication&) const = default;
};

enum class CorpusFormat { WosTagged, ScopusCsv };
enum class DetectedFormat { WosTagged, ScopusCsv, Unknown };

struct Diagnostic {
  std::size_t line = 0;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

// Accepted publications plus one diagnostic per rejected record.
struct Corpus {
  std::vector<Publication> publications;
  CorpusFormat format = CorpusFormat::WosTagged;
  std::vector<Diagnostic> diagnostics;

  std::size_t ref_count() const;
  const Publication* find(std::string_view id) const;

  bool operator==(const Corpus&) const = default;
};

// Web of Science tagged plain text. Records run from "PT " to "ER"; AU, TI,
// SO, PY, DI and CR are read, and each CR line (tag line or three-space
// continuation) yields one cited reference. Throws Error(NotWosFormat) when
// non-empty input has no "PT " line and Error(Encoding) on invalid UTF-8.
Corpus parse_wos_export(std::string_view bytes);

// Scopus CSV export. Requires the Title, Authors, Year, Source title, DOI and
// References header columns; References is split on "; ".
Corpus parse_scopus_csv(std::string_view bytes);

DetectedFormat detect_format(std::string_view bytes);

// Dispatches on an explicit format, or detects it when format is empty.
Corpus parse_corpus(std::string_view bytes, std::optional<CorpusFormat> format = std::nullopt);

std::string_view to_string(CorpusFormat f);
std::optional<CorpusFormat> corpus_format_from_string(std::string_view s);

}  // namespace rpys
