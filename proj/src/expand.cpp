#include "cve/expand.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cve/error.hpp"
#include "cve/io.hpp"
#include "cve/kernels.hpp"
#include "cve/text.hpp"

namespace cve {

using nlohmann::json;

std::string to_string(ClosureMode mode) { return mode == ClosureMode::Strict ? "strict" : "closure"; }

ClosureMode closure_mode_from_string(const std::string& s) {
  if (s == "strict") return ClosureMode::Strict;
  if (s == "closure") return ClosureMode::Closure;
  throw InvalidArgument("unknown closure mode '" + s + "' (expected strict|closure)");
}

Selection select_new_tokens(const BpeTokenizer& aux, const Vocabulary& source_vocab,
                            std::span<const std::string> corpus, std::size_t k) {
  Selection sel;
  if (k == 0) return sel;
  const auto freq = kernels::count_tokens(aux, corpus);
  std::vector<TokenId> candidates;
  for (TokenId id = 0; id < aux.size(); ++id) {
    if (aux.vocab().is_special(id)) continue;
    if (source_vocab.contains(aux.vocab().tokens()[id])) continue;
    candidates.push_back(id);
  }
  const std::size_t take = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), [&](TokenId a, TokenId b) {
                      if (freq[a] != freq[b]) return freq[a] > freq[b];
                      return a < b;
                    });
  for (std::size_t i = 0; i < take; ++i) {
    sel.tokens.push_back(aux.vocab().tokens()[candidates[i]]);
    sel.frequency.push_back(freq[candidates[i]]);
  }
  return sel;
}

std::size_t vocab_overlap(const Vocabulary& a, const Vocabulary& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  return static_cast<std::size_t>(std::count_if(small.tokens().begin(), small.tokens().end(),
                                                [&](const Token& t) { return large.contains(t); }));
}

std::vector<TokenId> ExpansionResult::new_ids() const {
  std::vector<TokenId> ids(new_tokens.size());
  std::iota(ids.begin(), ids.end(), static_cast<TokenId>(source_vocab_size));
  return ids;
}

std::vector<TokenId> ExpansionResult::added_ids() const {
  std::vector<TokenId> ids(new_tokens.size() + intermediates.size());
  std::iota(ids.begin(), ids.end(), static_cast<TokenId>(source_vocab_size));
  return ids;
}

std::vector<Token> ExpansionResult::added_tokens() const {
  std::vector<Token> out = new_tokens;
  out.insert(out.end(), intermediates.begin(), intermediates.end());
  return out;
}

namespace {

// Walks auxiliary derivations down to source tokens.
class DerivationWalker {
public:
  DerivationWalker(const BpeTokenizer& source, const BpeTokenizer& aux,
                   const std::unordered_set<std::string>& selected)
      : source_(source), aux_(aux), selected_(selected) {}

  // Closure mode: records every merge rank on the path. Returns reachability.
  bool require(const Token& t) {
    if (source_.vocab().contains(t)) return true;
    if (auto it = memo_.find(t); it != memo_.end()) return it->second;
    bool ok = false;
    if (const auto id = aux_.vocab().find(t)) {
      if (const auto rank = aux_.producer_rank(*id)) {
        const auto& m = aux_.merges()[*rank];
        const bool l = require(aux_.vocab().tokens()[m.left]);
        const bool r = require(aux_.vocab().tokens()[m.right]);
        ok = l && r;
        if (ok) ranks_.insert(*rank);
      }
    }
    memo_.emplace(t, ok);
    return ok;
  }

  // Strict mode: a selected token is reachable when its auxiliary producer
  // was appended and both operands are reachable.
  bool reachable_strict(const Token& t) {
    if (source_.vocab().contains(t)) return true;
    if (!selected_.count(t)) return false;
    if (auto it = memo_.find(t); it != memo_.end()) return it->second;
    memo_.emplace(t, false);  // guards against malformed cycles
    bool ok = false;
    if (const auto id = aux_.vocab().find(t)) {
      if (const auto rank = aux_.producer_rank(*id); rank && ranks_.count(*rank)) {
        const auto& m = aux_.merges()[*rank];
        ok = reachable_strict(aux_.vocab().tokens()[m.left]) &&
             reachable_strict(aux_.vocab().tokens()[m.right]);
      }
    }
    memo_[t] = ok;
    return ok;
  }

  void select_strict_merges() {
    for (std::size_t rank = 0; rank < aux_.merges().size(); ++rank) {
      const auto& m = aux_.merges()[rank];
      const auto& res = aux_.vocab().tokens()[m.result];
      if (!selected_.count(res)) continue;
      if (allowed(aux_.vocab().tokens()[m.left]) && allowed(aux_.vocab().tokens()[m.right])) {
        ranks_.insert(rank);
      }
    }
  }

  const std::set<std::size_t>& ranks() const { return ranks_; }

private:
  bool allowed(const Token& t) const { return source_.vocab().contains(t) || selected_.count(t); }

  const BpeTokenizer& source_;
  const BpeTokenizer& aux_;
  const std::unordered_set<std::string>& selected_;
  std::unordered_map<std::string, bool> memo_;
  std::set<std::size_t> ranks_;
};

}  // namespace

ExpansionResult build_target_tokenizer(const BpeTokenizer& source, const BpeTokenizer& aux,
                                       std::span<const Token> new_tokens, ClosureMode mode) {
  std::unordered_set<std::string> selected;
  for (const auto& t : new_tokens) {
    if (t.empty()) throw InvalidArgument("empty new token");
    if (source.vocab().contains(t)) {
      throw InvalidArgument("new token '" + escape_token(t) + "' is already in the source vocabulary");
    }
    if (!selected.insert(t).second) {
      throw InvalidArgument("new token '" + escape_token(t) + "' listed twice");
    }
  }

  ExpansionResult result;
  result.mode = mode;
  result.new_tokens.assign(new_tokens.begin(), new_tokens.end());
  result.source_vocab_size = source.size();
  result.overlap_count = vocab_overlap(source.vocab(), aux.vocab());

  DerivationWalker walker(source, aux, selected);
  if (mode == ClosureMode::Closure) {
    for (const auto& t : new_tokens) {
      if (!walker.require(t)) result.unreachable.push_back(t);
    }
  } else {
    walker.select_strict_merges();
    for (const auto& t : new_tokens) {
      if (!walker.reachable_strict(t)) result.unreachable.push_back(t);
    }
  }

  // Intermediates in auxiliary rank order.
  for (auto rank : walker.ranks()) {
    const auto& res = aux.vocab().tokens()[aux.merges()[rank].result];
    if (!selected.count(res)) result.intermediates.push_back(res);
  }

  Vocabulary vocab = source.vocab();
  for (const auto& t : result.new_tokens) vocab.add(t);
  for (const auto& t : result.intermediates) vocab.add(t);

  std::vector<MergeRule> merges = source.merges();
  for (auto rank : walker.ranks()) {
    const auto& m = aux.merges()[rank];
    merges.push_back({*vocab.find(aux.vocab().tokens()[m.left]), *vocab.find(aux.vocab().tokens()[m.right]),
                      *vocab.find(aux.vocab().tokens()[m.result])});
  }
  result.appended_merges = walker.ranks().size();
  result.target = BpeTokenizer(std::move(vocab), std::move(merges), source.byte_fallback());
  return result;
}

ExpansionSummary expansion_report(const ExpansionResult& r) {
  ExpansionSummary s;
  s.source_vocab_size = r.source_vocab_size;
  s.target_vocab_size = r.target.size();
  s.num_new = r.new_tokens.size();
  s.num_intermediates = r.intermediates.size();
  s.num_unreachable = r.unreachable.size();
  s.overlap_count = r.overlap_count;
  s.appended_merges = r.appended_merges;
  for (std::size_t i = 0; i < r.new_tokens.size(); ++i) {
    s.frequencies.emplace_back(r.new_tokens[i], i < r.selection_frequency.size() ? r.selection_frequency[i] : 0);
  }
  return s;
}

json summary_to_json(const ExpansionSummary& s) {
  json freq = json::array();
  for (const auto& [t, f] : s.frequencies) freq.push_back({{"token", escape_token(t)}, {"frequency", f}});
  return json{{"format_version", kFormatVersion},
              {"source_vocab_size", s.source_vocab_size},
              {"target_vocab_size", s.target_vocab_size},
              {"new_tokens", s.num_new},
              {"intermediates", s.num_intermediates},
              {"unreachable", s.num_unreachable},
              {"overlap", s.overlap_count},
              {"appended_merges", s.appended_merges},
              {"selection_frequency", std::move(freq)}};
}

std::string summary_to_text(const ExpansionSummary& s) {
  std::ostringstream os;
  auto row = [&](const char* k, std::size_t v) { os << std::left << std::setw(20) << k << std::right << std::setw(10) << v << "\n"; };
  row("source_vocab_size", s.source_vocab_size);
  row("target_vocab_size", s.target_vocab_size);
  row("new_tokens", s.num_new);
  row("intermediates", s.num_intermediates);
  row("unreachable", s.num_unreachable);
  row("overlap", s.overlap_count);
  row("appended_merges", s.appended_merges);
  return os.str();
}

json expansion_to_json(const ExpansionResult& r) {
  json new_tokens = json::array();
  for (std::size_t i = 0; i < r.new_tokens.size(); ++i) {
    json e{{"token", escape_token(r.new_tokens[i])}, {"id", r.source_vocab_size + i}};
    if (i < r.selection_frequency.size()) e["frequency"] = r.selection_frequency[i];
    new_tokens.push_back(std::move(e));
  }
  json inter = json::array();
  for (std::size_t i = 0; i < r.intermediates.size(); ++i) {
    inter.push_back({{"token", escape_token(r.intermediates[i])}, {"id", r.source_vocab_size + r.new_tokens.size() + i}});
  }
  json unreachable = json::array();
  for (const auto& t : r.unreachable) unreachable.push_back(escape_token(t));
  return json{{"format_version", kFormatVersion},
              {"mode", to_string(r.mode)},
              {"source_vocab_size", r.source_vocab_size},
              {"target_vocab_size", r.target.size()},
              {"overlap_count", r.overlap_count},
              {"appended_merges", r.appended_merges},
              {"new_tokens", std::move(new_tokens)},
              {"intermediates", std::move(inter)},
              {"unreachable", std::move(unreachable)}};
}

ExpansionResult expansion_from_json(const json& j, BpeTokenizer target) {
  if (!j.is_object()) throw FormatError("expansion: document is not an object");
  check_format_version(j, "expansion");
  try {
    ExpansionResult r;
    r.mode = closure_mode_from_string(j.at("mode").get<std::string>());
    r.source_vocab_size = j.at("source_vocab_size").get<std::size_t>();
    r.overlap_count = j.at("overlap_count").get<std::size_t>();
    r.appended_merges = j.at("appended_merges").get<std::size_t>();
    if (j.at("target_vocab_size").get<std::size_t>() != target.size()) {
      throw FormatError("expansion: target vocabulary size does not match the target tokenizer");
    }
    std::size_t expected_id = r.source_vocab_size;
    auto read_entry = [&](const json& e) {
      Token t = unescape_token(e.at("token").get<std::string>());
      const auto id = e.at("id").get<std::size_t>();
      if (id != expected_id || id >= target.size() || target.vocab().tokens()[id] != t) {
        throw FormatError("expansion: token '" + escape_token(t) + "' does not match target id " + std::to_string(id));
      }
      ++expected_id;
      return t;
    };
    bool all_freq = true;
    for (const auto& e : j.at("new_tokens")) {
      r.new_tokens.push_back(read_entry(e));
      if (e.contains("frequency")) {
        r.selection_frequency.push_back(e["frequency"].get<std::uint64_t>());
      } else {
        all_freq = false;
      }
    }
    if (!all_freq) r.selection_frequency.clear();
    for (const auto& e : j.at("intermediates")) r.intermediates.push_back(read_entry(e));
    if (expected_id != target.size()) {
      throw FormatError("expansion: new tokens and intermediates do not cover the target vocabulary");
    }
    for (const auto& e : j.at("unreachable")) r.unreachable.push_back(unescape_token(e.get<std::string>()));
    r.target = std::move(target);
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("expansion: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("expansion: ") + e.what());
  }
}

}  // namespace cve
