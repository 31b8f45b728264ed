#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "cve/bpe.hpp"
#include "cve/error.hpp"
#include "cve/text.hpp"

namespace cve {

namespace {

struct Word {
  std::vector<TokenId> symbols;
  std::uint64_t freq = 0;
};

std::uint64_t key(TokenId l, TokenId r) { return (static_cast<std::uint64_t>(l) << 32) | r; }
TokenId key_left(std::uint64_t k) { return static_cast<TokenId>(k >> 32); }
TokenId key_right(std::uint64_t k) { return static_cast<TokenId>(k & 0xFFFFFFFFu); }

struct HeapEntry {
  std::int64_t count;
  std::uint64_t pair;
};

// Incremental trainer state. Per-pair counts are kept exact by subtracting a
// word's pairs before rewriting it and adding them back afterwards; a lazy
// max-heap picks the best pair and discards entries whose count is stale.
class Trainer {
public:
  Trainer(std::vector<Word> words, Vocabulary& vocab) : words_(std::move(words)), vocab_(vocab) {
    for (std::uint32_t w = 0; w < words_.size(); ++w) {
      const auto& sym = words_[w].symbols;
      for (std::size_t i = 0; i + 1 < sym.size(); ++i) {
        const auto p = key(sym[i], sym[i + 1]);
        counts_[p] += static_cast<std::int64_t>(words_[w].freq);
        auto& list = where_[p];
        if (list.empty() || list.back() != w) list.push_back(w);
      }
    }
    for (const auto& [p, c] : counts_) push(p, c);
  }

  void run(std::size_t target_size, std::vector<MergeRule>& merges) {
    while (vocab_.size() < target_size) {
      const auto best = pop_best();
      if (!best) break;
      const TokenId l = key_left(*best);
      const TokenId r = key_right(*best);
      Token merged = vocab_.tokens()[l] + vocab_.tokens()[r];
      if (vocab_.contains(merged)) {
        banned_.insert(*best);
        continue;
      }
      const TokenId result = vocab_.add(std::move(merged));
      merges.push_back({l, r, result});
      apply(*best, l, r, result);
    }
  }

  std::vector<std::uint64_t> final_counts() const {
    std::vector<std::uint64_t> out(vocab_.size(), 0);
    for (const auto& w : words_)
      for (auto id : w.symbols) out[id] += w.freq;
    return out;
  }

private:
  bool better(const HeapEntry& a, const HeapEntry& b) const {
    if (a.count != b.count) return a.count > b.count;
    const auto& al = vocab_.tokens()[key_left(a.pair)];
    const auto& bl = vocab_.tokens()[key_left(b.pair)];
    if (al != bl) return al < bl;
    return vocab_.tokens()[key_right(a.pair)] < vocab_.tokens()[key_right(b.pair)];
  }

  void push(std::uint64_t pair, std::int64_t count) {
    heap_.push_back({count, pair});
    std::push_heap(heap_.begin(), heap_.end(), [this](const auto& a, const auto& b) { return better(b, a); });
  }

  std::optional<std::uint64_t> pop_best() {
    auto cmp = [this](const auto& a, const auto& b) { return better(b, a); };
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), cmp);
      const HeapEntry e = heap_.back();
      heap_.pop_back();
      auto it = counts_.find(e.pair);
      if (it == counts_.end() || it->second != e.count || e.count <= 0) continue;
      if (banned_.count(e.pair)) continue;
      return e.pair;
    }
    return std::nullopt;
  }

  void apply(std::uint64_t pair, TokenId l, TokenId r, TokenId result) {
    auto list = std::move(where_[pair]);
    where_.erase(pair);
    std::unordered_map<std::uint64_t, std::int64_t> delta;
    for (auto w : list) {
      auto& word = words_[w];
      auto& sym = word.symbols;
      bool present = false;
      for (std::size_t i = 0; i + 1 < sym.size(); ++i) {
        if (sym[i] == l && sym[i + 1] == r) {
          present = true;
          break;
        }
      }
      if (!present) continue;
      const auto f = static_cast<std::int64_t>(word.freq);
      for (std::size_t i = 0; i + 1 < sym.size(); ++i) delta[key(sym[i], sym[i + 1])] -= f;

      std::vector<TokenId> next;
      next.reserve(sym.size());
      for (std::size_t i = 0; i < sym.size();) {
        if (i + 1 < sym.size() && sym[i] == l && sym[i + 1] == r) {
          next.push_back(result);
          i += 2;
        } else {
          next.push_back(sym[i]);
          ++i;
        }
      }
      sym = std::move(next);
      for (std::size_t i = 0; i + 1 < sym.size(); ++i) {
        const auto p = key(sym[i], sym[i + 1]);
        delta[p] += f;
        if (sym[i] == result || sym[i + 1] == result) {
          auto& wl = where_[p];
          if (wl.empty() || wl.back() != w) wl.push_back(w);
        }
      }
    }
    // Apply in a fixed order so heap contents do not depend on hash order.
    std::vector<std::pair<std::uint64_t, std::int64_t>> changed(delta.begin(), delta.end());
    std::sort(changed.begin(), changed.end());
    for (const auto& [p, d] : changed) {
      if (d == 0) continue;
      auto& c = counts_[p];
      c += d;
      if (c <= 0) {
        counts_.erase(p);
      } else {
        push(p, c);
      }
    }
  }

  std::vector<Word> words_;
  Vocabulary& vocab_;
  std::unordered_map<std::uint64_t, std::int64_t> counts_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where_;
  std::unordered_set<std::uint64_t> banned_;
  std::vector<HeapEntry> heap_;
};

}  // namespace

BpeTokenizer train_bpe(std::span<const std::string> corpus, const TrainOptions& options) {
  if (corpus.empty()) throw InvalidArgument("cannot train a tokenizer on an empty corpus");

  std::unordered_map<std::string, std::uint64_t> chunk_counts;
  std::array<bool, 256> seen{};
  for (const auto& sentence : corpus) {
    for (auto [b, e] : split_chunks(sentence)) ++chunk_counts[sentence.substr(b, e - b)];
    for (char c : sentence) seen[static_cast<unsigned char>(c)] = true;
  }

  std::vector<Token> base = options.specials;
  for (int b = 0; b < 256; ++b) {
    if (options.byte_fallback || seen[b]) base.emplace_back(1, static_cast<char>(b));
  }
  const std::size_t min_size = base.size();
  if (options.vocab_size < min_size) {
    throw InvalidArgument("vocab size " + std::to_string(options.vocab_size) +
                          " is below the base size " + std::to_string(min_size));
  }
  Vocabulary vocab = Vocabulary::from_tokens(std::move(base), options.specials.size());

  // Chunks sorted by bytes so word indices are reproducible.
  std::vector<std::pair<std::string, std::uint64_t>> sorted(chunk_counts.begin(), chunk_counts.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Word> words;
  words.reserve(sorted.size());
  for (const auto& [chunk, freq] : sorted) {
    Word w;
    w.freq = freq;
    w.symbols.reserve(chunk.size());
    for (char c : chunk) w.symbols.push_back(*vocab.byte_id(static_cast<unsigned char>(c)));
    words.push_back(std::move(w));
  }

  std::vector<MergeRule> merges;
  Trainer trainer(std::move(words), vocab);
  trainer.run(options.vocab_size, merges);
  auto counts = trainer.final_counts();

  BpeTokenizer tok(std::move(vocab), std::move(merges), options.byte_fallback);
  tok.set_training_counts(std::move(counts));
  return tok;
}

}  // namespace cve
