#include "cve/corpus.hpp"

#include <algorithm>
#include <iterator>
#include <random>

#include "cve/error.hpp"
#include "cve/io.hpp"
#include "cve/text.hpp"

namespace cve {

Corpus corpus_from_text(std::string_view text, std::optional<std::size_t> sample_size, std::uint64_t seed,
                        std::string source) {
  Corpus c;
  c.source = std::move(source);
  c.sample_size = sample_size;
  c.seed = seed;
  std::vector<std::string> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      ++c.empty_dropped;
      continue;
    }
    if (auto bad = find_invalid_utf8(line); bad != std::string_view::npos) {
      throw FormatError(c.source + ":" + std::to_string(line_no) + ": invalid UTF-8 at byte " +
                        std::to_string(bad + 1));
    }
    lines.emplace_back(line);
  }
  c.lines_read = lines.size();
  if (sample_size && *sample_size < lines.size()) {
    std::mt19937_64 rng(seed);
    std::sample(std::make_move_iterator(lines.begin()), std::make_move_iterator(lines.end()),
                std::back_inserter(c.sentences), *sample_size, rng);
  } else {
    c.sentences = std::move(lines);
  }
  return c;
}

Corpus load_corpus(const std::filesystem::path& path, std::optional<std::size_t> sample_size, std::uint64_t seed) {
  return corpus_from_text(read_file(path), sample_size, seed, path.string());
}

nlohmann::json corpus_descriptor(const Corpus& c) {
  return {{"source", c.source},
          {"sample_size", c.sample_size ? nlohmann::json(*c.sample_size) : nlohmann::json(nullptr)},
          {"seed", c.seed},
          {"lines_read", c.lines_read},
          {"empty_dropped", c.empty_dropped},
          {"sentences", c.sentences.size()}};
}

}  // namespace cve
