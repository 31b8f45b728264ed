#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cve/bpe.hpp"

namespace cve {

// How the target tokenizer is made able to produce the selected tokens.
enum class ClosureMode {
  // Append only auxiliary merges whose operands and result are all source or
  // selected tokens. Tokens whose derivation needs anything else stay
  // unreachable and are reported.
  Strict,
  // Append every auxiliary merge on each selected token's derivation path,
  // adding missing intermediate tokens to the vocabulary.
  Closure,
};

std::string to_string(ClosureMode mode);
ClosureMode closure_mode_from_string(const std::string& s);  // throws InvalidArgument

struct Selection {
  std::vector<Token> tokens;
  std::vector<std::uint64_t> frequency;  // parallel to tokens
};

// The k most frequent auxiliary tokens that are not already source tokens.
// Frequency is the occurrence count when the corpus is re-encoded with `aux`;
// ties go to the lower auxiliary id. Specials are never selected.
Selection select_new_tokens(const BpeTokenizer& aux, const Vocabulary& source_vocab,
                            std::span<const std::string> corpus, std::size_t k);

struct ExpansionResult {
  ClosureMode mode = ClosureMode::Closure;
  std::vector<Token> new_tokens;      // ids source_size .. source_size + |new| - 1
  std::vector<Token> intermediates;   // ids after the new tokens
  std::vector<Token> unreachable;     // subset of new_tokens
  std::vector<std::uint64_t> selection_frequency;  // parallel to new_tokens; may be empty
  std::size_t source_vocab_size = 0;
  std::size_t overlap_count = 0;      // |V_s ∩ V_aux|
  std::size_t appended_merges = 0;
  BpeTokenizer target;

  std::vector<TokenId> new_ids() const;
  // New tokens followed by intermediates: every row the expansion appends.
  std::vector<TokenId> added_ids() const;
  std::vector<Token> added_tokens() const;
};

// Target vocabulary = source tokens (ids unchanged), then `new_tokens` in the
// given order, then intermediates ordered by auxiliary rank. Target merges =
// all source merges (ranks unchanged) followed by the selected auxiliary
// merges in auxiliary rank order. Throws InvalidArgument when a new token is
// already a source token or listed twice.
ExpansionResult build_target_tokenizer(const BpeTokenizer& source, const BpeTokenizer& aux,
                                       std::span<const Token> new_tokens, ClosureMode mode);

std::size_t vocab_overlap(const Vocabulary& a, const Vocabulary& b);

struct ExpansionSummary {
  std::size_t source_vocab_size = 0;
  std::size_t target_vocab_size = 0;
  std::size_t num_new = 0;
  std::size_t num_intermediates = 0;
  std::size_t num_unreachable = 0;
  std::size_t overlap_count = 0;
  std::size_t appended_merges = 0;
  std::vector<std::pair<Token, std::uint64_t>> frequencies;
};

ExpansionSummary expansion_report(const ExpansionResult& result);
nlohmann::json summary_to_json(const ExpansionSummary& s);
std::string summary_to_text(const ExpansionSummary& s);

// The target tokenizer is stored separately (tokenizer JSON); loading checks
// that the recorded token ids agree with it.
nlohmann::json expansion_to_json(const ExpansionResult& result);
ExpansionResult expansion_from_json(const nlohmann::json& j, BpeTokenizer target);  // throws FormatError

}  // namespace cve
