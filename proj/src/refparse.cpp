#include "rpys/refparse.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "rpys/text.hpp"

namespace rpys {
namespace {

std::vector<std::string_view> split_top_level(std::string_view s) {
  std::vector<std::string_view> tokens;
  int depth = 0;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"') {
      quoted = !quoted;
    } else if (!quoted && (c == '[' || c == '(')) {
      ++depth;
    } else if (!quoted && (c == ']' || c == ')') && depth > 0) {
      --depth;
    } else if (!quoted && depth == 0 && c == ',' && i + 1 < s.size() && s[i + 1] == ' ') {
      tokens.push_back(text::trim(s.substr(start, i - start)));
      start = i + 2;
      ++i;
    }
  }
  tokens.push_back(text::trim(s.substr(start)));
  return tokens;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::optional<int> as_year(std::string_view token) {
  if (token.size() != 4 || !all_digits(token)) return std::nullopt;
  const int y = std::atoi(std::string(token).c_str());
  return is_plausible_year(y) ? std::optional<int>(y) : std::nullopt;
}

// "V" followed by a digit: V7, V65, V12A
std::optional<std::string> as_volume(std::string_view token) {
  if (token.size() < 2 || token[0] != 'V' || !std::isdigit(static_cast<unsigned char>(token[1]))) return std::nullopt;
  if (token.find(' ') != std::string_view::npos) return std::nullopt;
  return text::normalize_name(token.substr(1));
}

// "P" followed by alphanumerics containing at least one digit: P84, PE1234.
// Requiring a digit keeps venue abbreviations such as PNAS out.
std::optional<std::string> as_page(std::string_view token) {
  if (token.size() < 2 || token[0] != 'P') return std::nullopt;
  const std::string_view rest = token.substr(1);
  if (!std::all_of(rest.begin(), rest.end(), [](unsigned char c) { return std::isalnum(c); })) return std::nullopt;
  if (std::none_of(rest.begin(), rest.end(), [](unsigned char c) { return std::isdigit(c); })) return std::nullopt;
  return text::normalize_name(rest);
}

std::optional<std::string> as_doi(std::string_view token) {
  if (!token.starts_with("DOI ")) return std::nullopt;
  std::string_view value = text::trim(token.substr(4));
  // WoS lists alternative DOIs as "DOI [a, b]"; keep the first
  if (value.starts_with('[')) {
    value.remove_prefix(1);
    value = value.substr(0, value.find_first_of(",]"));
  }
  std::string doi = text::normalize_doi(value);
  if (doi.empty()) return std::nullopt;
  return doi;
}

}  // namespace

ParsedCitedRef parse_cr_string(std::string_view raw, RawId raw_id) {
  ParsedCitedRef ref;
  ref.raw_id = std::move(raw_id);
  ref.raw = std::string(raw);
  const auto tokens = split_top_level(text::trim(raw));
  ref.first_author = text::normalize_name(tokens.front());

  bool source_open = false;  // the slot right after the year
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const std::string_view tok = tokens[i];
    if (tok.empty()) continue;
    if (!ref.rpy) {
      if (auto y = as_year(tok)) {
        ref.rpy = y;
        source_open = true;
        continue;
      }
    }
    if (!ref.doi) {
      if (auto d = as_doi(tok)) {
        ref.doi = std::move(d);
        continue;
      }
    }
    if (!ref.volume) {
      if (auto v = as_volume(tok)) {
        ref.volume = std::move(v);
        continue;
      }
    }
    if (!ref.page) {
      if (auto p = as_page(tok)) {
        ref.page = std::move(p);
        continue;
      }
    }
    if (source_open) {
      ref.source = text::normalize_name(tok);
      source_open = false;
    }
  }
  return ref;
}

std::vector<ParsedCitedRef> parse_corpus_refs(const Corpus& corpus) {
  std::vector<ParsedCitedRef> out;
  out.reserve(corpus.ref_count());
  for (const auto& pub : corpus.publications) {
    for (const auto& r : pub.raw_refs) out.push_back(parse_cr_string(r.raw, {r.citing_id, r.position}));
  }
  return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  const std::u32string x = text::decode_utf8(a);
  const std::u32string y = text::decode_utf8(b);
  std::vector<std::size_t> prev(y.size() + 1), cur(y.size() + 1);
  for (std::size_t j = 0; j <= y.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

double levenshtein_sim(std::string_view a, std::string_view b) {
  const std::size_t len = std::max(text::decode_utf8(a).size(), text::decode_utf8(b).size());
  if (len == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(len);
}

namespace {

// Absent on both sides earns half the weight; absent on one side earns none.
double string_component(const std::string& a, const std::string& b, double weight) {
  if (a.empty() && b.empty()) return 0.5 * weight;
  if (a.empty() || b.empty()) return 0.0;
  return weight * levenshtein_sim(a, b);
}

double equality_component(const std::optional<std::string>& a, const std::optional<std::string>& b, double weight) {
  if (!a && !b) return 0.5 * weight;
  if (!a || !b) return 0.0;
  return *a == *b ? weight : 0.0;
}

bool same_fields(const ParsedCitedRef& a, const ParsedCitedRef& b) {
  return a.first_author == b.first_author && a.rpy == b.rpy && a.source == b.source && a.volume == b.volume &&
         a.page == b.page && a.doi == b.doi;
}

}  // namespace

double ref_similarity(const ParsedCitedRef& a, const ParsedCitedRef& b, const SimilarityWeights& w) {
  if (a.doi && b.doi) return *a.doi == *b.doi ? 1.0 : 0.0;
  if (a.rpy && b.rpy && std::abs(*a.rpy - *b.rpy) > 1) return 0.0;
  if (same_fields(a, b)) return 1.0;
  const double score = string_component(a.first_author, b.first_author, w.author) +
                       string_component(a.source, b.source, w.source) +
                       equality_component(a.volume, b.volume, w.volume) + equality_component(a.page, b.page, w.page);
  return std::clamp(score, 0.0, 1.0);
}

}  // namespace rpys
