#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cve/bpe.hpp"

namespace cve {

// Tokenizer document:
//   {"format_version": 1,
//    "vocab": [escaped token strings in id order],
//    "merges": ["left right", ...] in rank order,
//    "specials": [escaped strings; they occupy the first vocab ids],
//    "byte_fallback": bool}
// Token strings use the escape convention of escape_token.
nlohmann::json tokenizer_to_json(const BpeTokenizer& tok);
BpeTokenizer tokenizer_from_json(const nlohmann::json& j);  // throws FormatError

BpeTokenizer tokenizer_from_text(std::string_view text);  // throws FormatError
void save_tokenizer(const std::filesystem::path& path, const BpeTokenizer& tok);
BpeTokenizer load_tokenizer(const std::filesystem::path& path);

}  // namespace cve
