#include "cve/analytics.hpp"

#include <cstdio>
#include <numeric>
#include <set>

#include "cve/error.hpp"
#include "cve/io.hpp"
#include "cve/kernels.hpp"

namespace cve {

namespace {

std::uint64_t total_tokens(const BpeTokenizer& tok, std::span<const std::string> corpus) {
  const auto per = kernels::tokens_per_sentence(tok, corpus);
  return std::accumulate(per.begin(), per.end(), std::uint64_t{0});
}

void finish(FragmentationReport& r) {
  std::set<std::string> names;
  for (const auto& row : r.rows) {
    if (!names.insert(row.name).second) throw InvalidArgument("duplicate name '" + row.name + "'");
  }
  const double base = r.row(r.baseline).avg_tokens_per_sentence;
  if (base <= 0) throw InvalidArgument("baseline produced no tokens");
  for (auto& row : r.rows) row.relative_to_baseline = row.avg_tokens_per_sentence / base;
}

FragmentationRow measure(std::string name, const BpeTokenizer& tok, std::span<const std::string> corpus) {
  if (corpus.empty()) throw InvalidArgument("empty corpus '" + name + "'");
  FragmentationRow row;
  row.name = std::move(name);
  row.sentences = corpus.size();
  row.total_tokens = total_tokens(tok, corpus);
  row.avg_tokens_per_sentence = static_cast<double>(row.total_tokens) / static_cast<double>(corpus.size());
  return row;
}

}  // namespace

const FragmentationRow& FragmentationReport::row(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw InvalidArgument("'" + name + "' is not in the report");
}

const FragmentationRow& FragmentationReport::worst() const {
  if (rows.empty()) throw InvalidArgument("empty report");
  return *std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.relative_to_baseline < b.relative_to_baseline;
  });
}

FragmentationReport fragmentation(std::span<const std::string> corpus, std::span<const NamedTokenizer> tokenizers,
                                  const std::string& baseline) {
  if (corpus.empty()) throw InvalidArgument("empty corpus");
  FragmentationReport r;
  r.baseline = baseline;
  for (const auto& t : tokenizers) {
    if (!t.tokenizer) throw InvalidArgument("null tokenizer '" + t.name + "'");
    r.rows.push_back(measure(t.name, *t.tokenizer, corpus));
  }
  finish(r);
  return r;
}

FragmentationReport language_fragmentation(const BpeTokenizer& tokenizer, std::span<const NamedCorpus> corpora,
                                           const std::string& baseline) {
  FragmentationReport r;
  r.baseline = baseline;
  for (const auto& c : corpora) r.rows.push_back(measure(c.name, tokenizer, c.sentences));
  finish(r);
  return r;
}

double target_token_ratio(std::span<const std::string> corpus, const BpeTokenizer& target,
                          std::span<const TokenId> new_ids) {
  if (corpus.empty()) throw InvalidArgument("empty corpus");
  for (auto id : new_ids) {
    if (id >= target.size()) throw InvalidArgument("new token id " + std::to_string(id) + " not in target");
  }
  const auto counts = kernels::count_tokens(target, corpus);
  const auto total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) return 0.0;
  std::uint64_t hits = 0;
  for (auto id : std::set<TokenId>(new_ids.begin(), new_ids.end())) hits += counts[id];
  return static_cast<double>(hits) / static_cast<double>(total);
}

SpeedupReport speedup_proxy(std::span<const std::string> corpus, const BpeTokenizer& source,
                            const BpeTokenizer& target, std::span<const TokenId> new_ids,
                            std::optional<std::span<const std::string>> generated) {
  if (corpus.empty()) throw InvalidArgument("empty corpus");
  SpeedupReport r;
  r.source_tokens = total_tokens(source, corpus);
  r.target_tokens = total_tokens(target, corpus);
  r.token_ratio = r.target_tokens == 0 ? 1.0
                                       : static_cast<double>(r.source_tokens) / static_cast<double>(r.target_tokens);
  r.target_token_ratio_input = target_token_ratio(corpus, target, new_ids);
  if (generated && !generated->empty()) r.target_token_ratio_output = target_token_ratio(*generated, target, new_ids);
  return r;
}

std::vector<TokenId> ids_not_in(const BpeTokenizer& target, const Vocabulary& source) {
  std::vector<TokenId> out;
  for (TokenId id = 0; id < target.size(); ++id) {
    if (!source.contains(target.vocab().token(id))) out.push_back(id);
  }
  return out;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string aligned_columns(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string pad(width[i] - r[i].size(), ' ');
      if (i == 0) {
        line += r[i] + pad;
      } else {
        line += "  " + pad + r[i];
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

nlohmann::json fragmentation_to_json(const FragmentationReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"name", row.name},
                    {"sentences", row.sentences},
                    {"total_tokens", row.total_tokens},
                    {"avg_tokens_per_sentence", row.avg_tokens_per_sentence},
                    {"relative_to_baseline", row.relative_to_baseline}});
  }
  return {{"format_version", kFormatVersion}, {"report", "fragmentation"}, {"baseline", r.baseline}, {"rows", rows}};
}

std::string fragmentation_to_text(const FragmentationReport& r) {
  std::vector<std::vector<std::string>> rows = {{"name", "sentences", "tokens", "avg/sentence", "vs " + r.baseline}};
  for (const auto& row : r.rows) {
    rows.push_back({row.name, std::to_string(row.sentences), std::to_string(row.total_tokens),
                    fixed(row.avg_tokens_per_sentence, 2), fixed(row.relative_to_baseline, 3) + "x"});
  }
  return aligned_columns(rows);
}

nlohmann::json speedup_to_json(const SpeedupReport& r) {
  return {{"format_version", kFormatVersion},
          {"report", "speedup_proxy"},
          {"note", "token-count ratio; not a wall-clock measurement"},
          {"source_tokens", r.source_tokens},
          {"target_tokens", r.target_tokens},
          {"token_ratio", r.token_ratio},
          {"target_token_ratio_input", r.target_token_ratio_input},
          {"target_token_ratio_output",
           r.target_token_ratio_output ? nlohmann::json(*r.target_token_ratio_output) : nlohmann::json(nullptr)}};
}

std::string speedup_to_text(const SpeedupReport& r) {
  std::vector<std::vector<std::string>> rows = {
      {"source tokens", std::to_string(r.source_tokens)},
      {"target tokens", std::to_string(r.target_tokens)},
      {"token ratio (speedup proxy)", fixed(r.token_ratio, 4)},
      {"target token ratio, input", fixed(r.target_token_ratio_input, 4)},
  };
  if (r.target_token_ratio_output) {
    rows.push_back({"target token ratio, output", fixed(*r.target_token_ratio_output, 4)});
  }
  return aligned_columns(rows);
}

}  // namespace cve
