#pragma once

// Shared setup for tests and the acceptance binary.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cve/bpe.hpp"
#include "cve/embedding.hpp"

namespace cve::fixture {

using MergeList = std::vector<std::pair<std::string, std::string>>;

inline MergeList merge_strings(const BpeTokenizer& tok) {
  MergeList out;
  for (const auto& m : tok.merges()) out.emplace_back(tok.vocab().token(m.left), tok.vocab().token(m.right));
  return out;
}

// Source merges followed by `extra`: the layout an expansion produces.
inline BpeTokenizer extend(const BpeTokenizer& source, const MergeList& extra) {
  auto all = merge_strings(source);
  all.insert(all.end(), extra.begin(), extra.end());
  return BpeTokenizer::from_merges(all);
}

inline EmbeddingMatrix random_matrix(std::size_t rows, std::size_t dim, std::uint64_t seed,
                                     MatrixRole role = MatrixRole::InputEmbedding) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> data(rows * dim);
  for (auto& x : data) x = u(rng);
  return EmbeddingMatrix(rows, dim, role, std::move(data));
}

inline void set_row(EmbeddingMatrix& m, std::size_t i, std::vector<float> v) {
  auto r = m.row(i);
  std::copy(v.begin(), v.end(), r.begin());
}

// Builds "word" out of single characters with left-to-right merges.
inline MergeList spell(const std::string& word) {
  MergeList out;
  for (std::size_t i = 2; i <= word.size(); ++i) out.emplace_back(word.substr(0, i - 1), word.substr(i - 1, 1));
  return out;
}

}  // namespace cve::fixture
