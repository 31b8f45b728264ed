#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cve/bpe.hpp"

namespace cve {

struct NamedTokenizer {
  std::string name;
  const BpeTokenizer* tokenizer = nullptr;
};

struct NamedCorpus {
  std::string name;
  std::span<const std::string> sentences;
};

struct FragmentationRow {
  std::string name;
  std::size_t sentences = 0;
  std::uint64_t total_tokens = 0;
  double avg_tokens_per_sentence = 0;
  double relative_to_baseline = 0;  // avg / baseline avg
};

struct FragmentationReport {
  std::string baseline;
  std::vector<FragmentationRow> rows;

  const FragmentationRow& row(const std::string& name) const;  // throws InvalidArgument
  // The row with the largest relative value.
  const FragmentationRow& worst() const;
};

// One corpus, several tokenizers. Throws InvalidArgument on an empty corpus,
// duplicate names or a baseline that is not listed.
FragmentationReport fragmentation(std::span<const std::string> corpus, std::span<const NamedTokenizer> tokenizers,
                                  const std::string& baseline);
// One tokenizer, several (parallel) corpora: how much more a language
// fragments than the baseline language.
FragmentationReport language_fragmentation(const BpeTokenizer& tokenizer, std::span<const NamedCorpus> corpora,
                                           const std::string& baseline);

// Share of tokens in the target encoding of `corpus` whose id is in `new_ids`.
double target_token_ratio(std::span<const std::string> corpus, const BpeTokenizer& target,
                          std::span<const TokenId> new_ids);

// Source-over-target token counts: a proxy for generation speedup, since
// fewer tokens per text means fewer decoding steps. It does not measure time.
struct SpeedupReport {
  std::uint64_t source_tokens = 0;
  std::uint64_t target_tokens = 0;
  double token_ratio = 0;
  double target_token_ratio_input = 0;
  std::optional<double> target_token_ratio_output;  // needs generated text
};

SpeedupReport speedup_proxy(std::span<const std::string> corpus, const BpeTokenizer& source,
                            const BpeTokenizer& target, std::span<const TokenId> new_ids,
                            std::optional<std::span<const std::string>> generated = std::nullopt);

// Target ids not in the source vocabulary.
std::vector<TokenId> ids_not_in(const BpeTokenizer& target, const Vocabulary& source);

nlohmann::json fragmentation_to_json(const FragmentationReport& r);
std::string fragmentation_to_text(const FragmentationReport& r);
nlohmann::json speedup_to_json(const SpeedupReport& r);
std::string speedup_to_text(const SpeedupReport& r);

// Left-aligned first column, right-aligned others, two spaces between.
std::string aligned_columns(const std::vector<std::vector<std::string>>& rows);
std::string fixed(double v, int decimals);

}  // namespace cve
