#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cve {

// Byte offset of the first invalid UTF-8 sequence in `s`, or npos when `s` is
// well formed. Overlong forms, surrogates and code points above U+10FFFF are
// rejected.
std::size_t find_invalid_utf8(std::string_view s) noexcept;

inline bool is_valid_utf8(std::string_view s) noexcept {
  return find_invalid_utf8(s) == std::string_view::npos;
}

// Replaces each maximal invalid subsequence with U+FFFD. Returns the number of
// replacements made.
std::size_t sanitize_utf8(std::string_view in, std::string& out);

// Token string escape convention used by every JSON artifact:
//   0x20 (space)       -> U+2581 "▁"
//   '\'                -> "\\"
//   literal U+2581     -> "\xE2\x96\x81"
//   control bytes, DEL and bytes that are not part of a valid UTF-8 sequence
//                      -> "\xNN" (upper-case hex)
//   everything else    -> copied verbatim
// The mapping is a bijection on byte strings; escaped strings never contain a
// raw space, so "left right" merge lines split unambiguously.
std::string escape_token(std::string_view bytes);
std::string unescape_token(std::string_view escaped);  // throws FormatError

// Whitespace pre-tokenization: a new chunk begins at every space that follows
// a non-space byte, so runs of spaces attach to the word after them. Chunks
// tile the input exactly; merges never cross a chunk boundary.
std::vector<std::pair<std::size_t, std::size_t>> split_chunks(std::string_view text);

}  // namespace cve
