#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpys/corpus.hpp"

namespace rpys {

// (citing publication id, position in its reference list)
struct RawId {
  std::string citing_id;
  std::size_t position = 0;

  auto operator<=>(const RawId&) const = default;
  bool operator==(const RawId&) const = default;
};

struct ParsedCitedRef {
  RawId raw_id;
  std::string raw;
  std::string first_author;
  std::optional<int> rpy;
  std::string source;  // empty when absent
  std::optional<std::string> volume;
  std::optional<std::string> page;
  std::optional<std::string> doi;

  bool operator==(const ParsedCitedRef&) const = default;
};

// Splits on top-level ", " (not inside brackets, parentheses or double
// quotes) and assigns field roles by pattern. Never fails; at worst only
// first_author is populated.
ParsedCitedRef parse_cr_string(std::string_view raw, RawId raw_id = {});

std::vector<ParsedCitedRef> parse_corpus_refs(const Corpus& corpus);

// Code-point Levenshtein distance.
std::size_t levenshtein(std::string_view a, std::string_view b);

// 1 - dist / max(len); two empty strings score 1.
double levenshtein_sim(std::string_view a, std::string_view b);

struct SimilarityWeights {
  double author = 0.4;
  double source = 0.3;
  double volume = 0.15;
  double page = 0.15;
};

// Score in [0, 1]; symmetric. DOI agreement decides outright, a year gap
// above one rules a pair out, otherwise a weighted field comparison.
double ref_similarity(const ParsedCitedRef& a, const ParsedCitedRef& b, const SimilarityWeights& w = {});

}  // namespace rpys
