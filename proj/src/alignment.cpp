#include "cve/alignment.hpp"

#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cve/error.hpp"
#include "cve/io.hpp"
#include "cve/text.hpp"

namespace cve {

using nlohmann::json;

AlignRule align_rule_from_string(const std::string& s) {
  if (s == "overlap") return AlignRule::Overlap;
  if (s == "contain") return AlignRule::Contain;
  throw InvalidArgument("unknown alignment rule '" + s + "' (expected overlap|contain)");
}

const char* to_string(AlignRule rule) { return rule == AlignRule::Overlap ? "overlap" : "contain"; }

const AlignmentTable::Mappings* AlignmentTable::find(TokenId id) const {
  auto it = counts_.find(id);
  return it == counts_.end() ? nullptr : &it->second;
}

std::uint64_t AlignmentTable::total(TokenId id) const {
  std::uint64_t sum = 0;
  if (const auto* m = find(id))
    for (const auto& [ids, c] : *m) sum += c;
  return sum;
}

AlignmentTable build_alignment_table(std::span<const std::string> corpus, const BpeTokenizer& source,
                                     const BpeTokenizer& target, std::span<const TokenId> new_ids,
                                     AlignRule rule) {
  if (!source.byte_fallback() || !target.byte_fallback()) {
    throw InvalidArgument("alignment requires byte-fallback tokenizers");
  }
  std::vector<bool> is_new(target.size(), false);
  for (auto id : new_ids) {
    if (id >= target.size()) throw InvalidArgument("new token id " + std::to_string(id) + " not in target");
    is_new[id] = true;
  }
  return AlignmentTable(kernels::collect_alignments(corpus, source, target, is_new, rule));
}

std::string alignment_to_jsonl(const AlignmentTable& table, const BpeTokenizer& target) {
  std::ostringstream os;
  for (const auto& [id, maps] : table.counts()) {
    json mappings = json::array();
    for (const auto& [ids, count] : maps) mappings.push_back({{"ids", ids}, {"count", count}});
    json rec{{"format_version", kFormatVersion},
             {"token", escape_token(target.vocab().token(id))},
             {"id", id},
             {"mappings", std::move(mappings)}};
    os << rec.dump() << '\n';
  }
  return os.str();
}

AlignmentTable alignment_from_jsonl(std::string_view text, const BpeTokenizer& target,
                                    std::size_t source_vocab_size) {
  AlignmentCounts counts;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "alignment line " + std::to_string(line_no) + ": ";
    try {
      const auto rec = json::parse(line);
      if (!rec.is_object()) throw FormatError(where + "record is not an object");
      check_format_version(rec, where + "record");
      const auto id = rec.at("id").get<TokenId>();
      if (id >= target.size()) throw FormatError(where + "id out of range");
      if (unescape_token(rec.at("token").get<std::string>()) != target.vocab().token(id)) {
        throw FormatError(where + "token does not match the target vocabulary");
      }
      if (counts.count(id)) throw FormatError(where + "duplicate record for id " + std::to_string(id));
      auto& maps = counts[id];
      const auto& jm = rec.at("mappings");
      if (!jm.is_array() || jm.empty()) throw FormatError(where + "mappings must be a non-empty array");
      for (const auto& m : jm) {
        auto ids = m.at("ids").get<std::vector<TokenId>>();
        const auto count = m.at("count").get<std::uint64_t>();
        if (ids.empty()) throw FormatError(where + "empty mapping");
        if (count == 0) throw FormatError(where + "mapping count must be positive");
        for (auto s : ids) {
          if (s >= source_vocab_size) throw FormatError(where + "mapping id not in the source vocabulary");
        }
        if (!maps.emplace(std::move(ids), count).second) throw FormatError(where + "repeated mapping");
      }
    } catch (const json::exception& e) {
      throw FormatError(where + e.what());
    }
  }
  return AlignmentTable(std::move(counts));
}

void save_alignment(const std::filesystem::path& path, const AlignmentTable& table, const BpeTokenizer& target) {
  write_file(path, alignment_to_jsonl(table, target));
}

AlignmentTable load_alignment(const std::filesystem::path& path, const BpeTokenizer& target,
                              std::size_t source_vocab_size) {
  return alignment_from_jsonl(read_file(path), target, source_vocab_size);
}

}  // namespace cve
