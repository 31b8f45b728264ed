#pragma once

// Corpus-wide data-parallel kernels. Each kernel shards sentences (or matrix
// rows) across OpenMP threads and reduces per-thread partials; the reductions
// are integer counts or fixed-order sums, so results do not depend on the
// thread count. The `serial` namespace keeps a plain single-threaded
// reference of every kernel for tests and the benchmark.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cve/bpe.hpp"

namespace cve {

// How a target token's byte span selects source tokens.
enum class AlignRule {
  Overlap,  // every source token whose span intersects the target span
  Contain,  // only source tokens lying entirely inside the target span
};

// new token id -> (source id sequence -> occurrence count)
using AlignmentCounts = std::map<TokenId, std::map<std::vector<TokenId>, std::uint64_t>>;

namespace kernels {

int max_threads();
// Thread count for later kernel calls; n <= 0 restores the OpenMP default.
void set_max_threads(int n);

std::vector<std::uint64_t> count_tokens(const BpeTokenizer& tok, std::span<const std::string> corpus);
std::vector<std::size_t> tokens_per_sentence(const BpeTokenizer& tok, std::span<const std::string> corpus);
std::vector<Encoding> encode_corpus(const BpeTokenizer& tok, std::span<const std::string> corpus);

// `is_new[id]` marks target ids whose occurrences are collected.
AlignmentCounts collect_alignments(std::span<const std::string> corpus, const BpeTokenizer& source,
                                   const BpeTokenizer& target, const std::vector<bool>& is_new,
                                   AlignRule rule);

// Per-column mean and population standard deviation of a row-major matrix,
// accumulated in double. Rows are summed in index order within fixed-size
// blocks so the result is independent of scheduling.
struct ColumnMoments {
  std::vector<double> mean;
  std::vector<double> stddev;
};
ColumnMoments column_moments(std::span<const float> data, std::size_t rows, std::size_t cols);

namespace serial {

std::vector<std::uint64_t> count_tokens(const BpeTokenizer& tok, std::span<const std::string> corpus);
std::vector<std::size_t> tokens_per_sentence(const BpeTokenizer& tok, std::span<const std::string> corpus);
std::vector<Encoding> encode_corpus(const BpeTokenizer& tok, std::span<const std::string> corpus);
AlignmentCounts collect_alignments(std::span<const std::string> corpus, const BpeTokenizer& source,
                                   const BpeTokenizer& target, const std::vector<bool>& is_new,
                                   AlignRule rule);
ColumnMoments column_moments(std::span<const float> data, std::size_t rows, std::size_t cols);

}  // namespace serial
}  // namespace kernels
}  // namespace cve
