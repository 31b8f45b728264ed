#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cve/bpe.hpp"
#include "cve/kernels.hpp"

namespace cve {

AlignRule align_rule_from_string(const std::string& s);  // throws InvalidArgument
const char* to_string(AlignRule rule);

// For each new target token: the distinct source-id sequences it was aligned
// to in the corpus, with occurrence counts.
class AlignmentTable {
public:
  using Mappings = std::map<std::vector<TokenId>, std::uint64_t>;

  AlignmentTable() = default;
  explicit AlignmentTable(AlignmentCounts counts) : counts_(std::move(counts)) {}

  const AlignmentCounts& counts() const noexcept { return counts_; }
  const Mappings* find(TokenId id) const;
  std::uint64_t total(TokenId id) const;
  std::size_t size() const noexcept { return counts_.size(); }

  friend bool operator==(const AlignmentTable&, const AlignmentTable&) = default;

private:
  AlignmentCounts counts_;
};

// Encodes every sentence with both tokenizers and, for each occurrence of a
// token in `new_ids` in the target encoding, records the source tokens
// selected by `rule` over its byte span. Runs sharded across threads; the
// result is independent of the thread count.
AlignmentTable build_alignment_table(std::span<const std::string> corpus, const BpeTokenizer& source,
                                     const BpeTokenizer& target, std::span<const TokenId> new_ids,
                                     AlignRule rule = AlignRule::Overlap);

// JSON lines, one record per token in id order:
//   {"format_version":1,"token":"<escaped>","id":N,"mappings":[{"ids":[...],"count":C},...]}
std::string alignment_to_jsonl(const AlignmentTable& table, const BpeTokenizer& target);
// Validates ids against `target` and mapping ids against the first
// `source_vocab_size` ids. Throws FormatError with the offending line number.
AlignmentTable alignment_from_jsonl(std::string_view text, const BpeTokenizer& target,
                                    std::size_t source_vocab_size);

void save_alignment(const std::filesystem::path& path, const AlignmentTable& table, const BpeTokenizer& target);
AlignmentTable load_alignment(const std::filesystem::path& path, const BpeTokenizer& target,
                              std::size_t source_vocab_size);

}  // namespace cve
