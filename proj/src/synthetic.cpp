#include "cve/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace cve {

namespace {

void append_codepoint(std::string& s, char32_t cp) {
  // Only BMP code points are generated here.
  if (cp < 0x80) {
    s += static_cast<char>(cp);
  } else if (cp < 0x800) {
    s += static_cast<char>(0xC0 | (cp >> 6));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    s += static_cast<char>(0xE0 | (cp >> 12));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::vector<double> zipf_weights(std::size_t n, double s) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), s);
  return w;
}

// Georgian vowels and a consonant subset.
constexpr char32_t kVowels[] = {0x10D0, 0x10D4, 0x10D8, 0x10DD, 0x10E3};
constexpr char32_t kConsonants[] = {0x10D1, 0x10D2, 0x10D3, 0x10D5, 0x10D6, 0x10D7, 0x10D9, 0x10DA,
                                    0x10DB, 0x10DC, 0x10DE, 0x10E0, 0x10E1, 0x10E2, 0x10E5, 0x10E6};

std::string syllable(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> c(0, std::size(kConsonants) - 1);
  std::uniform_int_distribution<std::size_t> v(0, std::size(kVowels) - 1);
  std::string s;
  append_codepoint(s, kConsonants[c(rng)]);
  append_codepoint(s, kVowels[v(rng)]);
  return s;
}

std::vector<std::string> unique_morphemes(std::mt19937_64& rng, std::size_t n, std::size_t min_syl,
                                          std::size_t max_syl) {
  std::vector<std::string> out;
  std::uniform_int_distribution<std::size_t> len(min_syl, max_syl);
  while (out.size() < n) {
    std::string m;
    const std::size_t k = len(rng);
    for (std::size_t i = 0; i < k; ++i) m += syllable(rng);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

SyntheticLanguage::SyntheticLanguage(const SyntheticOptions& options)
    : options_(options), rng_(options.seed) {
  roots_ = unique_morphemes(rng_, options_.num_roots, 1, 3);
  suffixes_ = unique_morphemes(rng_, options_.num_suffixes, 1, 2);
  const auto rw = zipf_weights(roots_.size(), options_.zipf_exponent);
  const auto sw = zipf_weights(suffixes_.size(), options_.zipf_exponent);
  root_dist_ = std::discrete_distribution<std::size_t>(rw.begin(), rw.end());
  suffix_dist_ = std::discrete_distribution<std::size_t>(sw.begin(), sw.end());
}

std::string SyntheticLanguage::word() {
  std::string w = roots_[root_dist_(rng_)];
  std::uniform_int_distribution<std::size_t> n(0, options_.max_suffixes);
  const std::size_t k = n(rng_);
  for (std::size_t i = 0; i < k; ++i) w += suffixes_[suffix_dist_(rng_)];
  return w;
}

std::string SyntheticLanguage::sentence() {
  std::uniform_int_distribution<std::size_t> n(options_.min_words, options_.max_words);
  const std::size_t k = n(rng_);
  std::string s;
  for (std::size_t i = 0; i < k; ++i) {
    if (i) s += ' ';
    s += word();
  }
  s += std::bernoulli_distribution(0.8)(rng_) ? "." : "?";
  return s;
}

std::vector<std::string> SyntheticLanguage::sentences(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sentence());
  return out;
}

std::vector<std::string> synthetic_english(std::size_t n, std::uint64_t seed) {
  static const char* kWords[] = {
      "the", "of", "and", "to", "in", "is", "that", "for", "it", "as", "was", "with", "be", "by",
      "on", "not", "he", "this", "are", "or", "his", "from", "at", "which", "but", "have", "an",
      "had", "they", "you", "were", "their", "one", "all", "we", "can", "her", "has", "there",
      "been", "if", "more", "when", "will", "would", "who", "so", "no", "time", "people", "year",
      "water", "language", "model", "token", "sentence", "translation", "summary", "question",
      "answer", "between", "through", "during", "without", "another", "important", "different",
      "government", "children", "information", "development", "because", "however", "therefore"};
  std::mt19937_64 rng(seed);
  const auto w = zipf_weights(std::size(kWords), 1.0);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::uniform_int_distribution<std::size_t> len(4, 16);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    const std::size_t k = len(rng);
    for (std::size_t j = 0; j < k; ++j) {
      if (j) s += ' ';
      std::string word = kWords[pick(rng)];
      if (j == 0) word[0] = static_cast<char>(word[0] - 'a' + 'A');
      s += word;
    }
    s += '.';
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace cve
