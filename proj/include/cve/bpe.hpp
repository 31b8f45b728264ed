#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cve {

using TokenId = std::uint32_t;

// A token is an opaque, non-empty byte string (UTF-8 fragments allowed).
using Token = std::string;

struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

// Token ids plus the byte range of the input each token covers. Spans tile
// the input in order.
struct Encoding {
  std::vector<TokenId> ids;
  std::vector<ByteSpan> spans;

  std::size_t size() const noexcept { return ids.size(); }
  bool empty() const noexcept { return ids.empty(); }
};

// Bijective token <-> id map. Special tokens occupy ids [0, num_specials).
class Vocabulary {
public:
  Vocabulary() { byte_ids_.fill(-1); }

  // Throws InvalidArgument on empty or duplicate tokens.
  static Vocabulary from_tokens(std::vector<Token> tokens, std::size_t num_specials);

  TokenId add(Token token);

  std::optional<TokenId> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }

  // Throws InvalidArgument when `id` is out of range.
  const Token& token(TokenId id) const;

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t num_specials() const noexcept { return num_specials_; }
  bool is_special(TokenId id) const noexcept { return id < num_specials_; }

  std::optional<TokenId> byte_id(unsigned char byte) const noexcept {
    const auto id = byte_ids_[byte];
    if (id < 0) return std::nullopt;
    return static_cast<TokenId>(id);
  }
  bool has_all_bytes() const noexcept;

  const std::vector<Token>& tokens() const noexcept { return tokens_; }

private:
  std::vector<Token> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t num_specials_ = 0;
  std::array<std::int64_t, 256> byte_ids_{};
};

// `result` is the token whose bytes are left ++ right. The rank of a rule is
// its position in the owning tokenizer's merge list.
struct MergeRule {
  TokenId left = 0;
  TokenId right = 0;
  TokenId result = 0;

  friend bool operator==(const MergeRule&, const MergeRule&) = default;
};

struct Decoded {
  std::string text;
  // Set when the id sequence did not concatenate to valid UTF-8 and invalid
  // sequences were replaced with U+FFFD.
  bool lossy = false;
};

// Byte-level BPE tokenizer. Immutable after construction; every const member
// is safe to call concurrently.
//
// Encoding splits text into whitespace chunks (see split_chunks), maps each
// byte to its single-byte token and then repeatedly applies the lowest-rank
// applicable merge, leftmost occurrence first, until no merge applies.
// Special tokens are never produced by encode.
class BpeTokenizer {
public:
  BpeTokenizer() = default;

  // Validates every structural invariant; throws InvalidArgument.
  BpeTokenizer(Vocabulary vocab, std::vector<MergeRule> merges, bool byte_fallback);

  // Specials, then the 256 byte tokens (when byte_fallback), then one token
  // per merge given as (left, right) byte strings, in rank order.
  static BpeTokenizer from_merges(std::span<const std::pair<std::string, std::string>> merges,
                                  bool byte_fallback = true,
                                  std::vector<std::string> specials = {});

  Encoding encode(std::string_view text) const;
  std::vector<TokenId> encode_ids(std::string_view text) const;
  std::size_t count_tokens(std::string_view text) const;

  Decoded decode(std::span<const TokenId> ids) const;
  std::string decode_bytes(std::span<const TokenId> ids) const;

  // Producing rule of `token`, or nullopt for base and special tokens.
  // Throws InvalidArgument when `token` is not in the vocabulary.
  std::optional<std::pair<Token, Token>> merge_children(std::string_view token) const;
  std::optional<std::size_t> producer_rank(TokenId id) const;
  std::optional<std::size_t> merge_rank(TokenId left, TokenId right) const;

  const Vocabulary& vocab() const noexcept { return vocab_; }
  const std::vector<MergeRule>& merges() const noexcept { return merges_; }
  bool byte_fallback() const noexcept { return byte_fallback_; }
  std::size_t size() const noexcept { return vocab_.size(); }

  // Occurrence counts per id in the final training segmentation. Empty for
  // tokenizers that were not produced by train_bpe.
  const std::vector<std::uint64_t>& training_counts() const noexcept { return training_counts_; }
  void set_training_counts(std::vector<std::uint64_t> counts);

private:
  void encode_chunk(std::string_view text, std::size_t begin, std::size_t end,
                    std::vector<TokenId>& ids, std::vector<ByteSpan>* spans) const;

  static std::uint64_t pair_key(TokenId left, TokenId right) noexcept {
    return (static_cast<std::uint64_t>(left) << 32) | right;
  }

  Vocabulary vocab_;
  std::vector<MergeRule> merges_;
  std::unordered_map<std::uint64_t, std::uint32_t> merge_index_;
  std::vector<std::int64_t> producer_;
  bool byte_fallback_ = true;
  std::vector<std::uint64_t> training_counts_;
};

struct TrainOptions {
  std::size_t vocab_size = 50000;  // |V_aux| default
  bool byte_fallback = true;
  std::vector<std::string> specials;
};

// Greedy most-frequent-pair BPE over whitespace chunks. Pair counts include
// overlapping occurrences; ties go to the lexicographically smallest
// (left bytes, right bytes). A pair whose concatenation is already a token is
// never merged, so every token has at most one producing rule. Training stops
// at `vocab_size` entries or when no mergeable pair remains.
BpeTokenizer train_bpe(std::span<const std::string> corpus, const TrainOptions& options);

// Per-id occurrence counts of encode(tok, corpus), indexed by token id.
std::vector<std::uint64_t> token_frequency(const BpeTokenizer& tok,
                                           std::span<const std::string> corpus);

}  // namespace cve
