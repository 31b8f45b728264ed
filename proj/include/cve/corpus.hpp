#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace cve {

// One sentence per line.
struct Corpus {
  std::vector<std::string> sentences;
  std::string source;  // path, or a label for in-memory text
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 0;
  std::size_t lines_read = 0;     // non-empty lines in the input
  std::size_t empty_dropped = 0;  // blank lines skipped
};

// Splits on '\n' (a trailing '\r' is removed), skips blank lines and checks
// every line is UTF-8, throwing FormatError with its 1-based line number.
// With a sample size below the line count, keeps a uniformly random subset
// chosen from mt19937_64(seed), in original order; larger sizes keep all.
Corpus corpus_from_text(std::string_view text, std::optional<std::size_t> sample_size, std::uint64_t seed,
                        std::string source = "<memory>");
Corpus load_corpus(const std::filesystem::path& path, std::optional<std::size_t> sample_size = std::nullopt,
                   std::uint64_t seed = 0);  // throws IoError / FormatError

nlohmann::json corpus_descriptor(const Corpus& c);

}  // namespace cve
