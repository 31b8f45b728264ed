#include "cve/bpe_json.hpp"

#include "cve/error.hpp"
#include "cve/io.hpp"
#include "cve/text.hpp"

namespace cve {

using nlohmann::json;

json tokenizer_to_json(const BpeTokenizer& tok) {
  json vocab = json::array();
  for (const auto& t : tok.vocab().tokens()) vocab.push_back(escape_token(t));
  json merges = json::array();
  for (const auto& m : tok.merges()) {
    merges.push_back(escape_token(tok.vocab().tokens()[m.left]) + " " +
                     escape_token(tok.vocab().tokens()[m.right]));
  }
  json specials = json::array();
  for (std::size_t i = 0; i < tok.vocab().num_specials(); ++i) {
    specials.push_back(escape_token(tok.vocab().tokens()[i]));
  }
  return json{{"format_version", kFormatVersion},
              {"vocab", std::move(vocab)},
              {"merges", std::move(merges)},
              {"specials", std::move(specials)},
              {"byte_fallback", tok.byte_fallback()}};
}

BpeTokenizer tokenizer_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("tokenizer: document is not an object");
  check_format_version(j, "tokenizer");
  for (const char* field : {"vocab", "merges", "specials"}) {
    if (!j.contains(field) || !j[field].is_array()) {
      throw FormatError(std::string("tokenizer: missing array field '") + field + "'");
    }
  }
  if (!j.contains("byte_fallback") || !j["byte_fallback"].is_boolean()) {
    throw FormatError("tokenizer: missing boolean field 'byte_fallback'");
  }
  auto string_at = [](const json& arr, std::size_t i, const char* what) -> std::string {
    if (!arr[i].is_string()) throw FormatError(std::string("tokenizer: non-string entry in ") + what);
    return unescape_token(arr[i].get<std::string>());
  };

  try {
    const auto& jv = j["vocab"];
    const auto& js = j["specials"];
    std::vector<Token> tokens;
    tokens.reserve(jv.size());
    for (std::size_t i = 0; i < jv.size(); ++i) tokens.push_back(string_at(jv, i, "vocab"));
    if (js.size() > tokens.size()) throw FormatError("tokenizer: more specials than vocab entries");
    for (std::size_t i = 0; i < js.size(); ++i) {
      if (string_at(js, i, "specials") != tokens[i]) {
        throw FormatError("tokenizer: specials must occupy the first vocab ids in order");
      }
    }
    auto vocab = Vocabulary::from_tokens(std::move(tokens), js.size());

    const auto& jm = j["merges"];
    std::vector<MergeRule> merges;
    merges.reserve(jm.size());
    for (std::size_t i = 0; i < jm.size(); ++i) {
      if (!jm[i].is_string()) throw FormatError("tokenizer: non-string merge entry");
      const auto line = jm[i].get<std::string>();
      const auto sep = line.find(' ');
      if (sep == std::string::npos || line.find(' ', sep + 1) != std::string::npos) {
        throw FormatError("tokenizer: merge " + std::to_string(i) + " is not 'left right'");
      }
      const auto left = unescape_token(line.substr(0, sep));
      const auto right = unescape_token(line.substr(sep + 1));
      const auto l = vocab.find(left);
      const auto r = vocab.find(right);
      const auto res = vocab.find(left + right);
      if (!l || !r || !res) {
        throw FormatError("tokenizer: merge " + std::to_string(i) + " references unknown tokens");
      }
      merges.push_back({*l, *r, *res});
    }
    return BpeTokenizer(std::move(vocab), std::move(merges), j["byte_fallback"].get<bool>());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("tokenizer: ") + e.what());
  }
}

void save_tokenizer(const std::filesystem::path& path, const BpeTokenizer& tok) {
  write_json_file(path, tokenizer_to_json(tok));
}

BpeTokenizer tokenizer_from_text(std::string_view text) {
  return tokenizer_from_json(parse_json(text, "tokenizer"));
}

BpeTokenizer load_tokenizer(const std::filesystem::path& path) {
  return tokenizer_from_json(read_json_file(path));
}

}  // namespace cve
