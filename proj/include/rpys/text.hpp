#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rpys::text {

bool is_valid_utf8(std::string_view s);

// Drops a leading UTF-8 byte order mark, if any.
std::string_view strip_bom(std::string_view s);

std::string_view trim(std::string_view s);

// Splits on LF; a trailing CR on each line is removed. A final empty line
// after a terminating LF is not reported.
std::vector<std::string_view> split_lines(std::string_view s);

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

// Uppercases ASCII, folds Latin-1 / Latin Extended-A diacritics to their
// ASCII base letters, strips punctuation and collapses runs of whitespace.
// Idempotent.
std::string normalize_name(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// Lowercases and removes URL / "doi:" prefixes.
std::string normalize_doi(std::string_view s);

bool starts_with_ci(std::string_view s, std::string_view prefix);

}  // namespace rpys::text
