// Acceptance checks, one PASS/FAIL/SKIP line per criterion. Exit status is
// nonzero when any criterion fails.
//
// Criterion 9 needs external assets and is skipped unless both are set:
//   CVE_ACCEPT_TOKENIZERS  comma-separated tokenizer JSON files (toolkit schema)
//   CVE_ACCEPT_FLORES_DIR  directory of <lang>.dev files, one sentence per line,
//                          including eng_Latn.dev

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "cve/alignment.hpp"
#include "cve/analytics.hpp"
#include "cve/bpe_json.hpp"
#include "cve/corpus.hpp"
#include "cve/embed_init.hpp"
#include "cve/error.hpp"
#include "cve/expand.hpp"
#include "cve/kernels.hpp"
#include "cve/matrix_io.hpp"
#include "cve/plan.hpp"
#include "cve/synthetic.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cve;
using fixture::MergeList;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Result {
  Outcome outcome = Outcome::Fail;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool rows_equal(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

double rel_err(std::span<const float> got, const std::vector<double>& want) {
  double diff = 0, norm = 0;
  for (std::size_t d = 0; d < want.size(); ++d) {
    diff += (got[d] - want[d]) * (got[d] - want[d]);
    norm += want[d] * want[d];
  }
  return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12);
}

// 1 --------------------------------------------------------------------------
Result bpe_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::size_t matched = 0;
  const std::size_t n = 50;
  for (std::size_t i = 0; i < n; ++i) {
    const auto corpus = oracle::random_small_corpus(rng, 1000);
    const std::size_t vocab = 256 + std::uniform_int_distribution<std::size_t>(5, 80)(rng);
    const auto got = fixture::merge_strings(train_bpe(corpus, {.vocab_size = vocab}));
    matched += got == oracle::naive_train(corpus, vocab);
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << matched << "/" << n << " merge lists identical to the recount-every-step reference, " << fixed(secs, 2)
     << " s (limit 10 s)";
  return {matched == n && secs < 10 ? Outcome::Pass : Outcome::Fail, os.str()};
}

// 2 --------------------------------------------------------------------------
Result round_trip() {
  std::mt19937_64 rng(77);
  std::vector<std::string> train;
  for (int i = 0; i < 3000; ++i) train.push_back(oracle::random_unicode(rng, 40));
  SyntheticLanguage lang({.seed = 4});
  const auto extra = lang.sentences(1000);
  train.insert(train.end(), extra.begin(), extra.end());
  const auto tok = train_bpe(train, {.vocab_size = 3000});
  auto aux = train_bpe(extra, {.vocab_size = 1500});
  const auto target = build_target_tokenizer(tok, aux, select_new_tokens(aux, tok.vocab(), extra, 200).tokens,
                                             ClosureMode::Closure).target;
  std::size_t failures = 0;
  const std::size_t n = 10000;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = oracle::random_unicode(rng, 60);
    for (const auto* t : {&tok, &target}) {
      const auto d = t->decode(t->encode_ids(s));
      failures += d.text != s || d.lossy;
    }
  }
  std::ostringstream os;
  os << failures << " failures over " << n << " strings x 2 tokenizers";
  return {failures == 0 ? Outcome::Pass : Outcome::Fail, os.str()};
}

// 3 --------------------------------------------------------------------------
Result monotone_compression() {
  const auto t0 = Clock::now();
  SyntheticLanguage lang({.seed = 2024});
  const auto train = lang.sentences(3000);
  const auto heldout = lang.sentences(1000);
  auto english = synthetic_english(3000, 5);
  english.insert(english.end(), train.begin(), train.begin() + 30);
  const auto source = train_bpe(english, {.vocab_size = 1000});
  const auto aux = train_bpe(train, {.vocab_size = 8000});

  const auto src_counts = kernels::tokens_per_sentence(source, heldout);
  bool ok = true;
  double last_ratio = 0;
  std::ostringstream os;
  std::size_t not_shorter = 0, emitted_sentences = 0, bytes_only = 0;
  for (std::size_t k : {50, 100, 500, 1000, 5000}) {
    const auto sel = select_new_tokens(aux, source.vocab(), train, k);
    const auto r = build_target_tokenizer(source, aux, sel.tokens, ClosureMode::Closure);
    std::vector<bool> is_new(r.target.size(), false);
    for (auto id : r.new_ids()) is_new[id] = true;
    const auto enc = kernels::encode_corpus(r.target, heldout);
    std::size_t longer = 0;
    for (std::size_t i = 0; i < heldout.size(); ++i) {
      const auto tgt = enc[i].ids.size();
      longer += tgt > src_counts[i];
      const bool emitted = std::any_of(enc[i].ids.begin(), enc[i].ids.end(), [&](TokenId id) { return is_new[id]; });
      if (emitted) {
        ++emitted_sentences;
        not_shorter += tgt >= src_counts[i];
      } else {
        bytes_only += std::any_of(r.new_tokens.begin(), r.new_tokens.end(),
                                  [&](const Token& t) { return heldout[i].find(t) != std::string::npos; });
      }
    }
    const auto speed = speedup_proxy(heldout, source, r.target, r.added_ids());
    ok = ok && longer == 0 && speed.token_ratio >= last_ratio;
    last_ratio = speed.token_ratio;
    os << "k=" << k << ":" << fixed(speed.token_ratio, 3) << (longer ? "(LONGER)" : "") << " ";
  }
  ok = ok && not_shorter == 0;
  const double secs = seconds_since(t0);
  ok = ok && secs < 60;
  os << "| " << emitted_sentences << " sentence-k pairs emitting a new token, " << not_shorter
     << " not strictly shorter; " << bytes_only
     << " contain a new token's bytes without emitting it (diagnostic) | " << fixed(secs, 1) << " s";
  return {ok ? Outcome::Pass : Outcome::Fail, os.str()};
}

// 4 --------------------------------------------------------------------------
Result initializer_identities() {
  SyntheticLanguage lang({.seed = 31});
  const auto corpus = lang.sentences(2000);
  auto english = synthetic_english(2000, 3);
  english.insert(english.end(), corpus.begin(), corpus.begin() + 20);
  const auto source = train_bpe(english, {.vocab_size = 800});
  const auto aux = train_bpe(corpus, {.vocab_size = 3000});
  const auto sel = select_new_tokens(aux, source.vocab(), corpus, 200);
  const auto r = build_target_tokenizer(source, aux, sel.tokens, ClosureMode::Closure);
  const auto e = fixture::random_matrix(source.size(), 32, 5);
  const InitContext ctx{e, source, r.target};
  std::ostringstream os;
  bool ok = r.new_tokens.size() == 200;

  // Tokens the source encodes as one token. Only source tokens qualify: any
  // string the source encodes as a single token u has exactly u's bytes.
  std::vector<TokenId> single;
  for (TokenId id = 256; id < source.size() && single.size() < 200; ++id) {
    if (source.encode_ids(source.vocab().token(id)) == std::vector<TokenId>{id}) single.push_back(id);
  }
  std::size_t single_bad = 0;
  {
    const auto mean = init_mean(ctx, single);
    const auto merge = init_merge(ctx, single);
    const auto align = init_align(ctx, AlignmentTable{}, single);
    for (std::size_t i = 0; i < single.size(); ++i) {
      const auto want = e.row(single[i]);
      single_bad += !rows_equal(mean.row(i), want) || !rows_equal(merge.row(i), want) || !rows_equal(align.row(i), want);
    }
  }
  // Fallback paths on the 200 new tokens are exactly Mean.
  const auto fresh = r.new_ids();
  const auto mean_new = init_mean(ctx, fresh);
  std::size_t fallback_bad = !init_align(ctx, AlignmentTable{}, fresh).bitwise_equal(mean_new);
  {
    auto tokens = source.vocab().tokens();
    for (const auto& t : r.new_tokens) tokens.push_back(t);
    const BpeTokenizer producerless(Vocabulary::from_tokens(tokens, 0), source.merges(), true);
    fallback_bad += !init_merge({e, source, producerless}, fresh).bitwise_equal(mean_new);
  }
  ok = ok && single.size() == 200 && single_bad == 0 && fallback_bad == 0;
  os << single.size() << " single-subtoken tokens, " << single_bad << " mismatches; fallbacks "
     << (fallback_bad ? "DIFFER" : "bitwise Mean");

  // Hierarchical mean along "superherohype".
  {
    MergeList m;
    for (auto w : {"super", "hero", "hype"}) {
      auto s = fixture::spell(w);
      m.insert(m.end(), s.begin(), s.end());
    }
    const auto src = BpeTokenizer::from_merges(m);
    const auto tgt = fixture::extend(src, {{"super", "hero"}, {"superhero", "hype"}});
    const auto er = fixture::random_matrix(src.size(), 64, 9);
    const auto row = init_merge({er, src, tgt}, std::vector<TokenId>{*tgt.vocab().find("superherohype")});
    const auto sp = er.row(*src.vocab().find("super")), he = er.row(*src.vocab().find("hero")),
               hy = er.row(*src.vocab().find("hype"));
    bool exact = true;
    for (std::size_t d = 0; d < 64; ++d) {
      exact = exact && row.row(0)[d] == static_cast<float>(((double(sp[d]) + he[d]) / 2 + hy[d]) / 2);
    }
    ok = ok && exact;
    os << "; superherohype " << (exact ? "exact" : "MISMATCH");
  }

  // Align with unique mappings: each token seen only on its own surface form.
  {
    std::vector<std::string> surfaces;
    for (const auto& t : r.new_tokens) surfaces.push_back(t);
    const auto table = build_alignment_table(surfaces, source, r.target, fresh);
    const auto align = init_align(ctx, table, fresh);
    std::size_t checked = 0, bad = 0;
    for (std::size_t i = 0; i < fresh.size(); ++i) {
      const auto* maps = table.find(fresh[i]);
      if (!maps) continue;
      ++checked;
      if (maps->size() != 1 || maps->begin()->first != source.encode_ids(r.new_tokens[i])) {
        ++bad;
        continue;
      }
      const auto want = mean_new.row(i);
      bad += rel_err(align.row(i), {want.begin(), want.end()}) > 1e-6;
    }
    ok = ok && bad == 0 && checked > 100;
    os << "; Align=Mean on " << checked << " uniquely mapped, " << bad << " off";

    AlignmentCounts scaled = table.counts();
    for (auto& [id, maps] : scaled)
      for (auto& [ids, c] : maps) c *= 10;
    const auto corpus_table = build_alignment_table(corpus, source, r.target, fresh);
    AlignmentCounts scaled2 = corpus_table.counts();
    for (auto& [id, maps] : scaled2)
      for (auto& [ids, c] : maps) c *= 7;
    const bool invariant = init_align(ctx, AlignmentTable(scaled), fresh).bitwise_equal(align) &&
                           init_align(ctx, AlignmentTable(scaled2), fresh)
                               .bitwise_equal(init_align(ctx, corpus_table, fresh));
    ok = ok && invariant;
    os << "; count scaling " << (invariant ? "invariant" : "CHANGES ROWS");
  }
  return {ok ? Outcome::Pass : Outcome::Fail, os.str()};
}

// 5 --------------------------------------------------------------------------
Result align_oracle() {
  std::size_t rows = 0, bad = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed * 7919);
    const auto corpus = oracle::random_small_corpus(rng, 1000);
    const auto source = train_bpe(corpus, {.vocab_size = 256 + 8});
    const auto aux = train_bpe(corpus, {.vocab_size = 256 + 40});
    const auto r = build_target_tokenizer(source, aux, select_new_tokens(aux, source.vocab(), corpus, 15).tokens,
                                          ClosureMode::Closure);
    const auto ids = r.added_ids();
    const std::set<TokenId> fresh(ids.begin(), ids.end());
    const auto e = fixture::random_matrix(source.size(), 16, seed);
    const auto got = init_align({e, source, r.target}, build_alignment_table(corpus, source, r.target, ids), ids);

    // Brute force: average over occurrences of the mean of overlapping source rows.
    const auto sm = fixture::merge_strings(source), tm = fixture::merge_strings(r.target);
    std::map<TokenId, std::vector<double>> sum;
    std::map<TokenId, std::size_t> occ;
    for (const auto& s : corpus) {
      const auto sp = oracle::naive_encode_spans(sm, s);
      for (const auto& tp : oracle::naive_encode_spans(tm, s)) {
        const auto t = *r.target.vocab().find(tp.bytes);
        if (!fresh.count(t)) continue;
        std::vector<double> m(16, 0.0);
        double n = 0;
        for (const auto& p : sp) {
          if (p.end <= tp.begin || p.begin >= tp.end) continue;
          const auto row = e.row(*source.vocab().find(p.bytes));
          for (int d = 0; d < 16; ++d) m[d] += row[d];
          ++n;
        }
        auto& acc = sum[t];
        acc.resize(16, 0.0);
        for (int d = 0; d < 16; ++d) acc[d] += m[d] / n;
        ++occ[t];
      }
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto it = sum.find(ids[i]);
      if (it == sum.end()) continue;
      for (auto& x : it->second) x /= static_cast<double>(occ[ids[i]]);
      const double err = rel_err(got.row(i), it->second);
      worst = std::max(worst, err);
      bad += err > 1e-6;
      ++rows;
    }
  }
  std::ostringstream os;
  os << rows << " rows over 20 corpora, " << bad << " beyond 1e-6; worst relative error " << worst;
  return {bad == 0 && rows > 0 ? Outcome::Pass : Outcome::Fail, os.str()};
}

// 6 --------------------------------------------------------------------------
Result random_stats() {
  std::mt19937_64 rng(6);
  const std::size_t dim = 48;
  std::vector<float> data(4000 * dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const double mu = std::uniform_real_distribution<double>(-1, 1)(rng);
    const double sd = std::uniform_real_distribution<double>(0.001, 0.5)(rng);
    std::normal_distribution<double> nd(mu, sd);
    for (std::size_t i = 0; i < 4000; ++i) data[i * dim + d] = static_cast<float>(nd(rng));
  }
  const EmbeddingMatrix source(4000, dim, MatrixRole::InputEmbedding, std::move(data));
  const auto stats = embed_stats(source);
  const std::size_t n = 10000;
  const auto rows = init_random(stats, n, 123);
  const auto got = embed_stats(rows);
  double worst = 0;
  for (std::size_t d = 0; d < dim; ++d) {
    worst = std::max(worst, std::abs(got.mean[d] - stats.mean[d]) / (stats.stddev[d] / std::sqrt(double(n))));
  }
  const bool repro = init_random(stats, n, 123).bitwise_equal(rows);
  std::ostringstream os;
  os << "worst |mean error| = " << fixed(worst, 2) << " standard errors (limit 5); same seed "
     << (repro ? "bitwise identical" : "DIFFERS");
  return {worst <= 5 && repro ? Outcome::Pass : Outcome::Fail, os.str()};
}

// 7 --------------------------------------------------------------------------
Result plans() {
  std::ostringstream os;
  bool ok = true;
  const auto m = llama_manifest(32, 4096, 32000, false);
  const auto ls = make_plan(m, Strategy::TwoByTwoLS);
  const std::set<std::string> want = {"model.layers.0", "model.layers.1", "model.layers.30", "model.layers.31",
                                      "model.embed_tokens", "lm_head"};
  const auto& tr = ls.phases.at(0).trainable;
  const bool ls_ok = ls.phases.size() == 1 && tr.size() == want.size() && std::set(tr.begin(), tr.end()) == want &&
                     check_plan(ls, m).empty();
  ok = ok && ls_ok;
  os << "2x2ls " << (ls_ok ? "ok" : "WRONG");

  const auto two = make_plan(m, Strategy::TwoStage);
  const auto& p1 = two.phases.at(0);
  const bool two_ok = two.phases.size() == 2 && !p1.adapters && p1.trainable.size() == 2 &&
                      std::set(p1.trainable.begin(), p1.trainable.end()) ==
                          std::set<std::string>{"model.embed_tokens", "lm_head"} &&
                      check_plan(two, m).empty();
  ok = ok && two_ok;
  os << ", two-stage phase 1 " << (two_ok ? "ok" : "WRONG");

  // MTP head copied from an expanded head.
  auto source = BpeTokenizer::from_merges(MergeList{{"a", "b"}});
  auto aux = BpeTokenizer::from_merges(MergeList{{"a", "b"}, {"ab", "c"}, {"x", "y"}});
  auto r = build_target_tokenizer(source, aux, std::vector<Token>{"abc", "xy"}, ClosureMode::Closure);
  const auto ex = expand_matrices(fixture::random_matrix(source.size(), 16, 1), fixture::random_matrix(source.size(), 16, 2, MatrixRole::LmHead),
                                  false, InitMethod::mean(), source, r);
  const auto heads = init_mtp_heads(*ex.head, 1);
  const bool mtp_ok = heads.size() == 1 && heads[0].bitwise_equal(*ex.head) && heads[0].rows() == r.target.size();
  ok = ok && mtp_ok;
  os << ", MTP head " << (mtp_ok ? "bitwise copy" : "DIFFERS");

  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::uint64_t> len(1, 50'000'000);
  std::size_t pack_bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto n = len(rng);
    pack_bad += pack_corpus(n, 512, 8).num_optimizer_steps < pack_corpus(n, 2048, 8).num_optimizer_steps;
    const auto mult = n / 2048 * 2048 + 2048;
    pack_bad += pack_corpus(mult, 512, 1).num_optimizer_steps != 4 * pack_corpus(mult, 2048, 1).num_optimizer_steps;
  }
  ok = ok && pack_bad == 0;
  os << ", packing " << pack_bad << " violations over 100 lengths";
  return {ok ? Outcome::Pass : Outcome::Fail, os.str()};
}

// 8 --------------------------------------------------------------------------
Result formats() {
  SyntheticLanguage lang({.seed = 12});
  const auto corpus = lang.sentences(500);
  std::vector<std::string> train = synthetic_english(800, 2);
  train.push_back("tab\there \\ back\xE2\x96\x81slash \x01\x7F");
  const auto source = train_bpe(train, {.vocab_size = 500, .specials = {"<s>", "</s>"}});
  const auto aux = train_bpe(corpus, {.vocab_size = 900});
  const auto r = build_target_tokenizer(source, aux, select_new_tokens(aux, source.vocab(), corpus, 60).tokens,
                                        ClosureMode::Closure);
  const auto table = build_alignment_table(corpus, source, r.target, r.added_ids());
  const auto matrix = fixture::random_matrix(r.target.size(), 24, 3, MatrixRole::LmHead);

  std::ostringstream os;
  const auto tok_text = tokenizer_to_json(r.target).dump();
  const auto tok_back = tokenizer_from_json(nlohmann::json::parse(tok_text));
  const bool tok_rt = tokenizer_to_json(tok_back).dump() == tok_text && tok_back.merges() == r.target.merges() &&
                      tok_back.vocab().tokens() == r.target.vocab().tokens();
  const auto src_text = tokenizer_to_json(source).dump();
  const bool src_rt = tokenizer_to_json(tokenizer_from_json(nlohmann::json::parse(src_text))).dump() == src_text;
  const auto al_text = alignment_to_jsonl(table, r.target);
  const auto al_back = alignment_from_jsonl(al_text, r.target, source.size());
  const bool al_rt = al_back == table && alignment_to_jsonl(al_back, r.target) == al_text;
  const auto m_bytes = matrix_to_bytes(matrix);
  const auto m_back = matrix_from_bytes(m_bytes);
  const bool m_rt = m_back.bitwise_equal(matrix) && matrix_to_bytes(m_back) == m_bytes;
  bool ok = tok_rt && src_rt && al_rt && m_rt;
  os << "round trips: tokenizer " << (tok_rt && src_rt ? "ok" : "FAIL") << ", alignment " << (al_rt ? "ok" : "FAIL")
     << ", matrix " << (m_rt ? "ok" : "FAIL");

  // Corrupted variants: each must raise a typed error.
  auto tok_json = [&](auto&& edit) {
    return [&, edit] {
      auto j = nlohmann::json::parse(tok_text);
      edit(j);
      tokenizer_from_json(j);
    };
  };
  auto jsonl = [&](std::string text) { return [&, text] { alignment_from_jsonl(text, r.target, source.size()); }; };
  auto bytes = [&](std::function<void(std::string&)> edit) {
    return [&, edit] {
      auto b = m_bytes;
      edit(b);
      matrix_from_bytes(b);
    };
  };
  const auto first = al_text.substr(0, al_text.find('\n') + 1);
  const std::vector<std::pair<const char*, std::function<void()>>> cases = {
      {"tokenizer: truncated text", [&] { tokenizer_from_text(tok_text.substr(0, tok_text.size() / 2)); }},
      {"tokenizer: version", tok_json([](auto& j) { j["format_version"] = 99; })},
      {"tokenizer: missing merges", tok_json([](auto& j) { j.erase("merges"); })},
      {"tokenizer: duplicate token", tok_json([](auto& j) { j["vocab"].push_back(j["vocab"][300]); })},
      {"tokenizer: bad merge line", tok_json([](auto& j) { j["merges"][0] = "onlyone"; })},
      {"tokenizer: merge of unknown", tok_json([](auto& j) { j["merges"].push_back("zzzq qqzz"); })},
      {"tokenizer: bad escape", tok_json([](auto& j) { j["vocab"][400] = "\\xZZ"; })},
      {"tokenizer: vocab not array", tok_json([](auto& j) { j["vocab"] = 5; })},
      {"alignment: not json", jsonl("{\"format_version\":1,\n")},
      {"alignment: duplicate record", jsonl(first + first)},
      {"alignment: unknown id", jsonl(R"({"format_version":1,"token":"x","id":4000000,"mappings":[{"ids":[1],"count":1}]})")},
      {"alignment: zero count", jsonl(std::string(first).replace(first.rfind("\"count\":") + 8, 1, "0"))},
      {"alignment: token mismatch", jsonl(R"({"format_version":1,"token":"b","id":97,"mappings":[{"ids":[97],"count":1}]})")},
      {"alignment: version", jsonl(R"({"format_version":7,"token":"a","id":97,"mappings":[{"ids":[97],"count":1}]})")},
      {"matrix: magic", bytes([](std::string& b) { b[7] = '2'; })},
      {"matrix: truncated", bytes([](std::string& b) { b.resize(b.size() - 3); })},
      {"matrix: header only", bytes([](std::string& b) { b.resize(12); })},
      {"matrix: trailing", bytes([](std::string& b) { b += '\0'; })},
      {"matrix: overflowing size", bytes([](std::string& b) { std::memset(b.data() + 8, 0xFF, 8); })},
      {"matrix: role", bytes([](std::string& b) { b[16] = 9; })},
  };
  std::size_t typed = 0;
  std::string untyped;
  for (const auto& [name, fn] : cases) {
    try {
      fn();
      untyped += std::string(" [accepted: ") + name + "]";
    } catch (const cve::Error&) {
      ++typed;
    } catch (const std::exception& e) {
      untyped += std::string(" [untyped: ") + name + ": " + e.what() + "]";
    }
  }
  ok = ok && typed == cases.size();
  os << "; " << typed << "/" << cases.size() << " corruptions rejected with typed errors" << untyped;
  return {ok ? Outcome::Pass : Outcome::Fail, os.str()};
}

// 9 --------------------------------------------------------------------------
Result reference_fragmentation() {
  const char* toks = std::getenv("CVE_ACCEPT_TOKENIZERS");
  const char* dir = std::getenv("CVE_ACCEPT_FLORES_DIR");
  if (!toks || !dir || !*toks || !*dir) {
    return {Outcome::Skip, "set CVE_ACCEPT_TOKENIZERS and CVE_ACCEPT_FLORES_DIR to run"};
  }
  std::vector<Corpus> langs;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".dev") continue;
    langs.push_back(load_corpus(e.path()));
    langs.back().source = e.path().stem().string();
  }
  std::sort(langs.begin(), langs.end(), [](const auto& a, const auto& b) { return a.source < b.source; });
  std::vector<NamedCorpus> named;
  for (const auto& c : langs) named.push_back({c.source, c.sentences});
  std::ostringstream os;
  double best = 0;
  std::stringstream list(toks);
  std::string path;
  while (std::getline(list, path, ',')) {
    const auto tok = load_tokenizer(path);
    const auto rep = language_fragmentation(tok, named, "eng_Latn");
    const auto& w = rep.worst();
    best = std::max(best, w.relative_to_baseline);
    os << std::filesystem::path(path).filename().string() << ": worst " << w.name << " "
       << fixed(w.relative_to_baseline, 2) << "x; ";
  }
  os << "target >= 6.6x";
  return {best >= 6.8 - 0.2 ? Outcome::Pass : Outcome::Fail, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"BPE oracle equivalence", bpe_oracle},
      {"round-trip fuzz", round_trip},
      {"monotone compression", monotone_compression},
      {"initializer identities", initializer_identities},
      {"Align oracle", align_oracle},
      {"Random init statistics", random_stats},
      {"plan correctness", plans},
      {"format round-trips", formats},
      {"fragmentation spot check (optional)", reference_fragmentation},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {Outcome::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = r.outcome == Outcome::Pass ? "PASS" : r.outcome == Outcome::Skip ? "SKIP" : "FAIL";
    failed += r.outcome == Outcome::Fail;
    std::cout << "[" << tag << "] " << (i + 1) << ". " << criteria[i].first << ": " << r.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
