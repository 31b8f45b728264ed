#include <algorithm>
#include <queue>

#include "cve/bpe.hpp"
#include "cve/error.hpp"
#include "cve/kernels.hpp"
#include "cve/text.hpp"

namespace cve {

Vocabulary Vocabulary::from_tokens(std::vector<Token> tokens, std::size_t num_specials) {
  if (num_specials > tokens.size()) {
    throw InvalidArgument("more specials than vocabulary entries");
  }
  Vocabulary v;
  for (auto& t : tokens) v.add(std::move(t));
  v.num_specials_ = num_specials;
  // Specials never stand in for raw bytes.
  for (TokenId id = 0; id < num_specials; ++id) {
    const auto& t = v.tokens_[id];
    if (t.size() == 1) v.byte_ids_[static_cast<unsigned char>(t[0])] = -1;
  }
  return v;
}

TokenId Vocabulary::add(Token token) {
  if (token.empty()) throw InvalidArgument("empty token");
  const auto id = static_cast<TokenId>(tokens_.size());
  auto [it, inserted] = index_.emplace(token, id);
  if (!inserted) throw InvalidArgument("duplicate token '" + escape_token(token) + "'");
  if (token.size() == 1) byte_ids_[static_cast<unsigned char>(token[0])] = id;
  tokens_.push_back(std::move(token));
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Token& Vocabulary::token(TokenId id) const {
  if (id >= tokens_.size()) {
    throw InvalidArgument("token id " + std::to_string(id) + " out of range (vocabulary size " +
                          std::to_string(tokens_.size()) + ")");
  }
  return tokens_[id];
}

bool Vocabulary::has_all_bytes() const noexcept {
  return std::all_of(byte_ids_.begin(), byte_ids_.end(), [](auto id) { return id >= 0; });
}

BpeTokenizer::BpeTokenizer(Vocabulary vocab, std::vector<MergeRule> merges, bool byte_fallback)
    : vocab_(std::move(vocab)), merges_(std::move(merges)), byte_fallback_(byte_fallback) {
  if (byte_fallback_ && !vocab_.has_all_bytes()) {
    throw InvalidArgument("byte fallback requires all 256 single-byte tokens");
  }
  producer_.assign(vocab_.size(), -1);
  merge_index_.reserve(merges_.size());
  const auto n = vocab_.size();
  for (std::size_t rank = 0; rank < merges_.size(); ++rank) {
    const auto& m = merges_[rank];
    if (m.left >= n || m.right >= n || m.result >= n) {
      throw InvalidArgument("merge " + std::to_string(rank) + " references an unknown id");
    }
    if (vocab_.is_special(m.left) || vocab_.is_special(m.right) || vocab_.is_special(m.result)) {
      throw InvalidArgument("merge " + std::to_string(rank) + " involves a special token");
    }
    const auto& l = vocab_.tokens()[m.left];
    const auto& r = vocab_.tokens()[m.right];
    const auto& res = vocab_.tokens()[m.result];
    if (res.size() != l.size() + r.size() || res.compare(0, l.size(), l) != 0 ||
        res.compare(l.size(), r.size(), r) != 0) {
      throw InvalidArgument("merge " + std::to_string(rank) + " result is not left ++ right");
    }
    if (producer_[m.result] >= 0) {
      throw InvalidArgument("token '" + escape_token(res) + "' produced by more than one merge");
    }
    if (!merge_index_.emplace(pair_key(m.left, m.right), static_cast<std::uint32_t>(rank)).second) {
      throw InvalidArgument("duplicate merge pair at rank " + std::to_string(rank));
    }
    producer_[m.result] = static_cast<std::int64_t>(rank);
  }
}

BpeTokenizer BpeTokenizer::from_merges(
    std::span<const std::pair<std::string, std::string>> merges, bool byte_fallback,
    std::vector<std::string> specials) {
  std::vector<Token> tokens = specials;
  if (byte_fallback) {
    for (int b = 0; b < 256; ++b) tokens.emplace_back(1, static_cast<char>(b));
  }
  auto vocab = Vocabulary::from_tokens(std::move(tokens), specials.size());
  std::vector<MergeRule> rules;
  rules.reserve(merges.size());
  for (const auto& [l, r] : merges) {
    auto left = vocab.find(l);
    auto right = vocab.find(r);
    if (!left || !right) {
      throw InvalidArgument("merge operand not in vocabulary: '" + escape_token(l) + "' '" +
                            escape_token(r) + "'");
    }
    const auto result = vocab.add(l + r);
    rules.push_back({*left, *right, result});
  }
  return BpeTokenizer(std::move(vocab), std::move(rules), byte_fallback);
}

void BpeTokenizer::set_training_counts(std::vector<std::uint64_t> counts) {
  if (!counts.empty() && counts.size() != vocab_.size()) {
    throw InvalidArgument("training counts size does not match vocabulary");
  }
  training_counts_ = std::move(counts);
}

namespace {

struct Symbol {
  TokenId id;
  std::size_t begin;
  std::size_t len;
  std::int64_t prev;
  std::int64_t next;
};

struct Candidate {
  std::uint32_t rank;
  std::size_t begin;  // byte offset of the left symbol; orders ties leftmost
  std::int64_t left;
  std::int64_t right;

  bool operator>(const Candidate& o) const noexcept {
    if (rank != o.rank) return rank > o.rank;
    return begin > o.begin;
  }
};

}  // namespace

void BpeTokenizer::encode_chunk(std::string_view text, std::size_t begin, std::size_t end,
                                std::vector<TokenId>& ids, std::vector<ByteSpan>* spans) const {
  std::vector<Symbol> syms;
  syms.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const auto byte = static_cast<unsigned char>(text[i]);
    const auto id = vocab_.byte_id(byte);
    if (!id) {
      static constexpr char kHex[] = "0123456789ABCDEF";
      throw EncodeError(std::string("byte 0x") + kHex[byte >> 4] + kHex[byte & 0xF] +
                        " at offset " + std::to_string(i) + " is not in the vocabulary");
    }
    const auto k = static_cast<std::int64_t>(syms.size());
    syms.push_back({*id, i, 1, k - 1, k + 1});
  }
  if (!syms.empty()) syms.back().next = -1;

  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> queue;
  auto try_push = [&](std::int64_t l, std::int64_t r) {
    if (l < 0 || r < 0) return;
    auto it = merge_index_.find(pair_key(syms[l].id, syms[r].id));
    if (it == merge_index_.end()) return;
    queue.push({it->second, syms[l].begin, l, r});
  };
  for (std::size_t k = 0; k + 1 < syms.size(); ++k) {
    try_push(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k + 1));
  }

  while (!queue.empty()) {
    const Candidate c = queue.top();
    queue.pop();
    auto& left = syms[c.left];
    auto& right = syms[c.right];
    if (left.len == 0 || right.len == 0 || left.next != c.right) continue;
    auto it = merge_index_.find(pair_key(left.id, right.id));
    if (it == merge_index_.end() || it->second != c.rank) continue;

    left.id = merges_[c.rank].result;
    left.len += right.len;
    right.len = 0;
    left.next = right.next;
    if (right.next >= 0) syms[right.next].prev = c.left;
    try_push(left.prev, c.left);
    try_push(c.left, left.next);
  }

  for (std::int64_t k = syms.empty() ? -1 : 0; k >= 0; k = syms[k].next) {
    ids.push_back(syms[k].id);
    if (spans) spans->push_back({syms[k].begin, syms[k].begin + syms[k].len});
  }
}

Encoding BpeTokenizer::encode(std::string_view text) const {
  Encoding enc;
  enc.ids.reserve(text.size() / 2 + 1);
  enc.spans.reserve(text.size() / 2 + 1);
  for (auto [b, e] : split_chunks(text)) encode_chunk(text, b, e, enc.ids, &enc.spans);
  return enc;
}

std::vector<TokenId> BpeTokenizer::encode_ids(std::string_view text) const {
  std::vector<TokenId> ids;
  ids.reserve(text.size() / 2 + 1);
  for (auto [b, e] : split_chunks(text)) encode_chunk(text, b, e, ids, nullptr);
  return ids;
}

std::size_t BpeTokenizer::count_tokens(std::string_view text) const {
  return encode_ids(text).size();
}

std::string BpeTokenizer::decode_bytes(std::span<const TokenId> ids) const {
  std::string out;
  for (auto id : ids) out += vocab_.token(id);
  return out;
}

Decoded BpeTokenizer::decode(std::span<const TokenId> ids) const {
  Decoded d;
  std::string raw = decode_bytes(ids);
  if (is_valid_utf8(raw)) {
    d.text = std::move(raw);
  } else {
    sanitize_utf8(raw, d.text);
    d.lossy = true;
  }
  return d;
}

std::optional<std::size_t> BpeTokenizer::producer_rank(TokenId id) const {
  if (id >= producer_.size()) {
    throw InvalidArgument("token id " + std::to_string(id) + " out of range");
  }
  if (producer_[id] < 0) return std::nullopt;
  return static_cast<std::size_t>(producer_[id]);
}

std::optional<std::size_t> BpeTokenizer::merge_rank(TokenId left, TokenId right) const {
  auto it = merge_index_.find(pair_key(left, right));
  if (it == merge_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::pair<Token, Token>> BpeTokenizer::merge_children(std::string_view token) const {
  const auto id = vocab_.find(token);
  if (!id) throw InvalidArgument("token '" + escape_token(token) + "' is not in the vocabulary");
  const auto rank = producer_rank(*id);
  if (!rank) return std::nullopt;
  const auto& m = merges_[*rank];
  return std::make_pair(vocab_.tokens()[m.left], vocab_.tokens()[m.right]);
}

std::vector<std::uint64_t> token_frequency(const BpeTokenizer& tok,
                                           std::span<const std::string> corpus) {
  return kernels::count_tokens(tok, corpus);
}

}  // namespace cve
