#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace cve {

// Generator for a synthetic agglutinative language written in Georgian
// script (three UTF-8 bytes per letter): words are a Zipf-distributed root
// followed by a chain of Zipf-distributed suffixes. A byte-level tokenizer
// trained on Latin text fragments it heavily, which makes it a desk-scale
// stand-in for an overfragmented low-resource language.
struct SyntheticOptions {
  std::uint64_t seed = 1;
  std::size_t num_roots = 400;
  std::size_t num_suffixes = 40;
  std::size_t max_suffixes = 4;
  std::size_t min_words = 3;
  std::size_t max_words = 12;
  double zipf_exponent = 1.1;
};

class SyntheticLanguage {
public:
  explicit SyntheticLanguage(const SyntheticOptions& options);

  // Successive calls continue the same stream, so two calls give disjoint
  // train and held-out samples.
  std::vector<std::string> sentences(std::size_t n);
  std::string sentence();

  const std::vector<std::string>& roots() const { return roots_; }
  const std::vector<std::string>& suffixes() const { return suffixes_; }

private:
  std::string word();

  SyntheticOptions options_;
  std::mt19937_64 rng_;
  std::vector<std::string> roots_;
  std::vector<std::string> suffixes_;
  std::discrete_distribution<std::size_t> root_dist_;
  std::discrete_distribution<std::size_t> suffix_dist_;
};

// Latin-script filler text with English-like word frequencies, for training
// source tokenizers.
std::vector<std::string> synthetic_english(std::size_t n, std::uint64_t seed);

}  // namespace cve
