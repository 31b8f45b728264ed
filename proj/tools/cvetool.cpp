// cvetool: vocabulary expansion pipeline driver.
//
//   train-aux    corpus -> auxiliary tokenizer
//   expand       source + aux tokenizer + corpus + k -> target tokenizer, expansion record
//   align-table  corpus + both tokenizers -> alignment table (JSON lines)
//   init         source matrices + expansion -> expanded matrices
//   plan         model manifest + strategy -> training plan
//   analyze      corpus + tokenizers -> fragmentation / speedup-proxy reports
//   sweep        expand (+ init) + analyze over a list of k
//   gen-corpus, gen-matrix   synthetic inputs for demos and tests
//
// Failures print one JSON error record to stderr and exit nonzero.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cve/alignment.hpp"
#include "cve/analytics.hpp"
#include "cve/bpe.hpp"
#include "cve/bpe_json.hpp"
#include "cve/corpus.hpp"
#include "cve/embed_init.hpp"
#include "cve/error.hpp"
#include "cve/expand.hpp"
#include "cve/io.hpp"
#include "cve/kernels.hpp"
#include "cve/matrix_io.hpp"
#include "cve/plan.hpp"
#include "cve/synthetic.hpp"
#include "json_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Default artifact names inside --output-dir.
constexpr const char* kAuxFile = "aux_tokenizer.json";
constexpr const char* kTargetFile = "target_tokenizer.json";
constexpr const char* kExpansionFile = "expansion.json";
constexpr const char* kAlignFile = "alignment.jsonl";
constexpr const char* kEmbedFile = "embedding.cvemb";
constexpr const char* kHeadFile = "head.cvemb";

struct Globals {
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  int threads = 0;
  bool quiet = false;
};

Globals g;

fs::path out_path(const std::string& name) { return fs::path(g.output_dir) / name; }

fs::path or_default(const std::string& given, const char* name) { return given.empty() ? out_path(name) : fs::path(given); }

void say(const std::string& text) {
  if (!g.quiet) std::cout << text;
}

cve::Corpus read_corpus(const std::string& path, std::size_t sample) {
  return cve::load_corpus(path, sample ? std::optional<std::size_t>(sample) : std::nullopt, g.seed);
}

// ---- train-aux ------------------------------------------------------------

struct TrainAuxArgs {
  std::string corpus;
  std::size_t vocab_size = 50000;
  std::size_t sample = 0;
  std::vector<std::string> specials;
  std::string out;
};

void run_train_aux(const TrainAuxArgs& a) {
  const auto corpus = read_corpus(a.corpus, a.sample);
  auto tok = cve::train_bpe(corpus.sentences, {.vocab_size = a.vocab_size, .specials = a.specials});
  const auto path = or_default(a.out, kAuxFile);
  cve::save_tokenizer(path, tok);
  say("trained " + std::to_string(tok.size()) + " tokens (" + std::to_string(tok.merges().size()) +
      " merges) on " + std::to_string(corpus.sentences.size()) + " sentences -> " + path.string() + "\n");
}

// ---- expand ---------------------------------------------------------------

struct ExpandArgs {
  std::string source;
  std::string aux;
  std::string corpus;
  std::size_t k = 100;
  std::string mode = "closure";
  std::size_t sample = 0;
};

struct Expanded {
  cve::ExpansionResult result;
  cve::ExpansionSummary summary;
};

Expanded expand_once(const cve::BpeTokenizer& source, const cve::BpeTokenizer& aux,
                     std::span<const std::string> corpus, std::size_t k, cve::ClosureMode mode) {
  const auto sel = cve::select_new_tokens(aux, source.vocab(), corpus, k);
  auto r = cve::build_target_tokenizer(source, aux, sel.tokens, mode);
  r.selection_frequency = sel.frequency;
  auto s = cve::expansion_report(r);
  return {std::move(r), std::move(s)};
}

void save_expansion(const fs::path& dir, const Expanded& e) {
  cve::save_tokenizer(dir / kTargetFile, e.result.target);
  cve::write_json_file(dir / kExpansionFile, cve::expansion_to_json(e.result));
  cve::write_json_file(dir / "expansion_report.json", cve::summary_to_json(e.summary));
}

void run_expand(const ExpandArgs& a) {
  const auto source = cve::load_tokenizer(a.source);
  const auto aux = cve::load_tokenizer(or_default(a.aux, kAuxFile));
  const auto corpus = read_corpus(a.corpus, a.sample);
  const auto e = expand_once(source, aux, corpus.sentences, a.k, cve::closure_mode_from_string(a.mode));
  save_expansion(g.output_dir, e);
  say(cve::summary_to_text(e.summary));
}

// ---- align-table ----------------------------------------------------------

struct AlignArgs {
  std::string corpus;
  std::string source;
  std::string target;
  std::string expansion;
  std::string rule = "overlap";
  std::size_t sample = 0;
  std::string out;
};

cve::ExpansionResult load_expansion(const std::string& expansion, const std::string& target) {
  return cve::expansion_from_json(cve::read_json_file(or_default(expansion, kExpansionFile)),
                                  cve::load_tokenizer(or_default(target, kTargetFile)));
}

void run_align(const AlignArgs& a) {
  const auto source = cve::load_tokenizer(a.source);
  const auto exp = load_expansion(a.expansion, a.target);
  const auto corpus = read_corpus(a.corpus, a.sample);
  const auto table = cve::build_alignment_table(corpus.sentences, source, exp.target, exp.added_ids(),
                                                cve::align_rule_from_string(a.rule));
  const auto path = or_default(a.out, kAlignFile);
  cve::save_alignment(path, table, exp.target);
  say("aligned " + std::to_string(table.size()) + " of " + std::to_string(exp.added_ids().size()) +
      " added tokens -> " + path.string() + "\n");
}

// ---- init -----------------------------------------------------------------

struct InitArgs {
  std::string method = "mean";
  std::string source;
  std::string target;
  std::string expansion;
  std::string embedding;
  std::string head;
  std::string alignment;
  std::string weighting = "normalized";
};

cve::InitMethod make_method(const std::string& name, const std::string& alignment, const std::string& weighting,
                            const cve::ExpansionResult& exp, std::size_t source_size) {
  switch (cve::init_kind_from_string(name)) {
    case cve::InitMethod::Kind::Random: return cve::InitMethod::random(g.seed);
    case cve::InitMethod::Kind::Mean: return cve::InitMethod::mean();
    case cve::InitMethod::Kind::Merge: return cve::InitMethod::merge();
    case cve::InitMethod::Kind::Align: {
      auto table = std::make_shared<cve::AlignmentTable>(
          cve::load_alignment(or_default(alignment, kAlignFile), exp.target, source_size));
      return cve::InitMethod::align(std::move(table), cve::align_weighting_from_string(weighting));
    }
    case cve::InitMethod::Kind::External: break;
  }
  throw cve::InvalidArgument("the external method is only available through the library API");
}

void init_and_save(const fs::path& dir, const cve::InitMethod& method, const cve::BpeTokenizer& source,
                   const cve::ExpansionResult& exp, const std::string& embedding, const std::string& head) {
  const auto e = cve::load_matrix(embedding);
  std::optional<cve::EmbeddingMatrix> h;
  if (!head.empty()) h = cve::load_matrix(head);
  const auto out = cve::expand_matrices(e, h, !h, method, source, exp);
  cve::save_matrix(dir / kEmbedFile, out.embedding);
  if (out.head) cve::save_matrix(dir / kHeadFile, *out.head);
}

void run_init(const InitArgs& a) {
  const auto source = cve::load_tokenizer(a.source);
  const auto exp = load_expansion(a.expansion, a.target);
  const auto method = make_method(a.method, a.alignment, a.weighting, exp, source.size());
  init_and_save(g.output_dir, method, source, exp, a.embedding, a.head);
  say("initialized " + std::to_string(exp.added_ids().size()) + " rows with " + a.method + (a.head.empty() ? " (tied)" : " (untied)") +
      " -> " + out_path(kEmbedFile).string() + (a.head.empty() ? "" : ", " + out_path(kHeadFile).string()) + "\n");
}

// ---- plan -----------------------------------------------------------------

struct PlanArgs {
  std::string manifest;
  std::size_t layers = 0;
  std::size_t hidden = 4096;
  std::size_t vocab = 0;
  bool tied = false;
  std::string strategy = "lora";
  std::string objective = "clm";
  unsigned heads = 2;
  unsigned seq_len = 2048;
  std::size_t train_rows_from = 0;
  std::uint64_t tokens = 0;
  unsigned batch = 8;
  std::string out;
};

void run_plan(const PlanArgs& a) {
  cve::ModelManifest m;
  if (!a.manifest.empty()) {
    m = cve::manifest_from_json(cve::read_json_file(a.manifest));
  } else {
    if (a.layers == 0 || a.vocab == 0) throw cve::InvalidArgument("give --manifest, or --layers and --vocab");
    m = cve::llama_manifest(a.layers, a.hidden, a.vocab, a.tied);
  }
  cve::PlanOptions o;
  if (a.objective == "mtp") {
    o.objective = cve::Objective::mtp(a.heads);
  } else if (a.objective != "clm") {
    throw cve::InvalidArgument("unknown objective '" + a.objective + "' (expected clm|mtp)");
  }
  o.seq_len = a.seq_len;
  o.hyper.batch_size = a.batch;
  if (a.train_rows_from) o.train_rows_from = a.train_rows_from;
  const auto plan = cve::make_plan(m, cve::strategy_from_string(a.strategy), o);
  if (auto problems = cve::check_plan(plan, m); !problems.empty()) {
    throw cve::InternalError("generated plan is unsound: " + problems.front());
  }
  auto j = cve::plan_to_json(plan);
  if (a.tokens) j["packing"] = cve::packing_to_json(cve::pack_corpus(a.tokens, a.seq_len, a.batch));
  const auto path = or_default(a.out, "plan.json");
  cve::write_json_file(path, j);
  for (const auto& w : plan.warnings) std::cerr << "warning: " << w << "\n";
  std::vector<std::vector<std::string>> rows = {{"phase", "full", "adapters"}};
  for (const auto& p : plan.phases) {
    rows.push_back({p.name, std::to_string(p.trainable.size()),
                    p.adapters ? std::to_string(p.adapters->targets.size()) + " (r=" + std::to_string(p.adapters->rank) + ")"
                               : "-"});
  }
  say(cve::aligned_columns(rows));
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeArgs {
  std::string corpus;
  std::string source;
  std::string target;
  std::string expansion;
  std::string generated;
  std::vector<std::string> langs;  // name=path
  std::string baseline_lang;
  std::size_t sample = 0;
};

json analyze(std::span<const std::string> corpus, const cve::BpeTokenizer& source, const cve::BpeTokenizer& target,
             std::span<const cve::TokenId> new_ids, const std::vector<std::string>* generated, std::string& text) {
  const std::vector<cve::NamedTokenizer> toks = {{"source", &source}, {"target", &target}};
  const auto frag = cve::fragmentation(corpus, toks, "source");
  std::optional<std::span<const std::string>> gen;
  if (generated) gen = std::span<const std::string>(*generated);
  const auto speed = cve::speedup_proxy(corpus, source, target, new_ids, gen);
  text += cve::fragmentation_to_text(frag) + "\n" + cve::speedup_to_text(speed);
  return {{"fragmentation", cve::fragmentation_to_json(frag)}, {"speedup", cve::speedup_to_json(speed)}};
}

void run_analyze(const AnalyzeArgs& a) {
  const auto source = cve::load_tokenizer(a.source);
  json report{{"format_version", cve::kFormatVersion}};
  std::string text;
  if (!a.corpus.empty()) {
    const auto target = cve::load_tokenizer(or_default(a.target, kTargetFile));
    std::vector<cve::TokenId> new_ids;
    if (!a.expansion.empty()) {
      new_ids = cve::expansion_from_json(cve::read_json_file(a.expansion), target).added_ids();
    } else {
      new_ids = cve::ids_not_in(target, source.vocab());
    }
    const auto corpus = read_corpus(a.corpus, a.sample);
    std::optional<cve::Corpus> generated;
    if (!a.generated.empty()) generated = cve::load_corpus(a.generated);
    report["corpus"] = cve::corpus_descriptor(corpus);
    report.update(analyze(corpus.sentences, source, target, new_ids,
                          generated ? &generated->sentences : nullptr, text));
  }
  if (!a.langs.empty()) {
    std::vector<cve::Corpus> held;
    for (const auto& item : a.langs) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw cve::InvalidArgument("--lang expects name=path, got '" + item + "'");
      held.push_back(read_corpus(item.substr(eq + 1), a.sample));
      held.back().source = item.substr(0, eq);
    }
    std::vector<cve::NamedCorpus> named;
    for (const auto& c : held) named.push_back({c.source, c.sentences});
    const auto baseline = a.baseline_lang.empty() ? named.front().name : a.baseline_lang;
    const auto frag = cve::language_fragmentation(source, named, baseline);
    report["languages"] = cve::fragmentation_to_json(frag);
    text += (text.empty() ? "" : "\n") + cve::fragmentation_to_text(frag);
  }
  if (a.corpus.empty() && a.langs.empty()) throw cve::InvalidArgument("analyze needs --corpus or --lang");
  cve::write_json_file(out_path("analysis.json"), report);
  say(text);
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::string source;
  std::string aux;
  std::string corpus;
  std::string heldout;
  std::vector<std::size_t> k = {50, 100, 500, 1000, 5000};
  std::string mode = "closure";
  std::string method;
  std::string embedding;
  std::string head;
  std::string rule = "overlap";
  std::size_t sample = 0;
};

void run_sweep(const SweepArgs& a) {
  const auto source = cve::load_tokenizer(a.source);
  const auto aux = cve::load_tokenizer(or_default(a.aux, kAuxFile));
  const auto corpus = read_corpus(a.corpus, a.sample);
  const auto heldout = a.heldout.empty() ? corpus : read_corpus(a.heldout, 0);
  const auto mode = cve::closure_mode_from_string(a.mode);
  if (!a.method.empty() && a.embedding.empty()) throw cve::InvalidArgument("--method needs --embedding");

  const auto src_counts = cve::kernels::tokens_per_sentence(source, heldout.sentences);
  json rows = json::array();
  std::vector<std::vector<std::string>> table = {
      {"k", "new", "intermediates", "target_vocab", "token_ratio", "target_ratio", "longer"}};
  double last_ratio = 0;
  bool non_decreasing = true;
  for (auto k : a.k) {
    const auto e = expand_once(source, aux, corpus.sentences, k, mode);
    const auto dir = out_path("k" + std::to_string(k));
    save_expansion(dir, e);
    const auto ids = e.result.added_ids();
    if (!a.method.empty()) {
      if (a.method == "align") {
        const auto t = cve::build_alignment_table(corpus.sentences, source, e.result.target, ids,
                                                  cve::align_rule_from_string(a.rule));
        cve::save_alignment(dir / kAlignFile, t, e.result.target);
      }
      const auto method = make_method(a.method, (dir / kAlignFile).string(), "normalized", e.result, source.size());
      init_and_save(dir, method, source, e.result, a.embedding, a.head);
    }
    const auto speed = cve::speedup_proxy(heldout.sentences, source, e.result.target, ids);
    const auto tgt_counts = cve::kernels::tokens_per_sentence(e.result.target, heldout.sentences);
    std::size_t longer = 0;
    for (std::size_t i = 0; i < tgt_counts.size(); ++i) longer += tgt_counts[i] > src_counts[i];
    non_decreasing = non_decreasing && speed.token_ratio >= last_ratio;
    last_ratio = speed.token_ratio;
    rows.push_back({{"k", k},
                    {"new_tokens", e.summary.num_new},
                    {"intermediates", e.summary.num_intermediates},
                    {"unreachable", e.summary.num_unreachable},
                    {"target_vocab_size", e.summary.target_vocab_size},
                    {"speedup", cve::speedup_to_json(speed)},
                    {"sentences_longer_than_source", longer}});
    table.push_back({std::to_string(k), std::to_string(e.summary.num_new), std::to_string(e.summary.num_intermediates),
                     std::to_string(e.summary.target_vocab_size), cve::fixed(speed.token_ratio, 4),
                     cve::fixed(speed.target_token_ratio_input, 4), std::to_string(longer)});
  }
  cve::write_json_file(out_path("sweep.json"), {{"format_version", cve::kFormatVersion},
                                                {"mode", a.mode},
                                                {"heldout", cve::corpus_descriptor(heldout)},
                                                {"token_ratio_non_decreasing", non_decreasing},
                                                {"rows", rows}});
  say(cve::aligned_columns(table));
}

// ---- generators -----------------------------------------------------------

struct GenCorpusArgs {
  std::string kind = "synthetic";
  std::size_t lines = 1000;
  std::size_t skip = 0;
  std::string out;
};

void run_gen_corpus(const GenCorpusArgs& a) {
  std::vector<std::string> lines;
  if (a.kind == "synthetic") {
    cve::SyntheticLanguage lang({.seed = g.seed});
    if (a.skip) lang.sentences(a.skip);
    lines = lang.sentences(a.lines);
  } else if (a.kind == "english") {
    lines = cve::synthetic_english(a.lines, g.seed);
  } else {
    throw cve::InvalidArgument("unknown corpus kind '" + a.kind + "' (expected synthetic|english)");
  }
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  const auto path = or_default(a.out, "corpus.txt");
  cve::write_file(path, text);
  say("wrote " + std::to_string(lines.size()) + " lines -> " + path.string() + "\n");
}

struct GenMatrixArgs {
  std::string tokenizer;
  std::size_t rows = 0;
  std::size_t dim = 64;
  std::string role = "embedding";
  double scale = 0.02;
  std::string out;
};

void run_gen_matrix(const GenMatrixArgs& a) {
  std::size_t rows = a.rows;
  if (!a.tokenizer.empty()) rows = cve::load_tokenizer(a.tokenizer).size();
  if (rows == 0) throw cve::InvalidArgument("give --rows or --tokenizer");
  if (a.dim == 0) throw cve::InvalidArgument("--dim must be positive");
  cve::MatrixRole role;
  if (a.role == "embedding") {
    role = cve::MatrixRole::InputEmbedding;
  } else if (a.role == "head") {
    role = cve::MatrixRole::LmHead;
  } else {
    throw cve::InvalidArgument("unknown role '" + a.role + "' (expected embedding|head)");
  }
  const cve::EmbedStats stats{std::vector<double>(a.dim, 0.0), std::vector<double>(a.dim, a.scale)};
  const auto m = cve::init_random(stats, rows, g.seed, role);
  const auto path = or_default(a.out, role == cve::MatrixRole::LmHead ? "source_head.cvemb" : "source_embedding.cvemb");
  cve::save_matrix(path, m);
  say("wrote " + std::to_string(rows) + "x" + std::to_string(a.dim) + " " + a.role + " -> " + path.string() + "\n");
}

void print_error(const std::string& code, const std::string& message, const std::string& subcommand) {
  json rec{{"error", code}, {"message", message}};
  if (!subcommand.empty()) rec["subcommand"] = subcommand;
  std::cerr << rec.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vocabulary expansion toolkit: auxiliary BPE, target tokenizer, embedding init, training plans"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<cvetool::JsonConfig>());
  app.set_config("--config", "", "JSON file mirroring any flag; sections per subcommand");
  app.add_option("--seed", g.seed, "Seed for sampling and random initialization")->capture_default_str();
  app.add_option("--output-dir", g.output_dir, "Directory for artifacts and default inputs")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = OpenMP default)");
  app.add_flag("--quiet", g.quiet, "Suppress text reports");

  TrainAuxArgs ta;
  auto* train = app.add_subcommand("train-aux", "Train the auxiliary BPE tokenizer on the target corpus");
  train->add_option("--corpus", ta.corpus, "One sentence per line")->required();
  train->add_option("--vocab-size", ta.vocab_size)->capture_default_str();
  train->add_option("--sample", ta.sample, "Sentences to sample (0 = all)");
  train->add_option("--special", ta.specials, "Special token (repeatable)");
  train->add_option("--out", ta.out, std::string("Default <output-dir>/") + kAuxFile);

  ExpandArgs ex;
  auto* expand = app.add_subcommand("expand", "Select k new tokens and build the target tokenizer");
  expand->add_option("--source", ex.source, "Source tokenizer JSON")->required();
  expand->add_option("--aux", ex.aux, std::string("Default <output-dir>/") + kAuxFile);
  expand->add_option("--corpus", ex.corpus)->required();
  expand->add_option("--k", ex.k)->capture_default_str();
  expand->add_option("--mode", ex.mode, "closure|strict")->capture_default_str();
  expand->add_option("--sample", ex.sample);

  AlignArgs al;
  auto* align = app.add_subcommand("align-table", "Map added target tokens to source tokens over a corpus");
  align->add_option("--corpus", al.corpus)->required();
  align->add_option("--source", al.source)->required();
  align->add_option("--target", al.target, std::string("Default <output-dir>/") + kTargetFile);
  align->add_option("--expansion", al.expansion, std::string("Default <output-dir>/") + kExpansionFile);
  align->add_option("--rule", al.rule, "overlap|contain")->capture_default_str();
  align->add_option("--sample", al.sample);
  align->add_option("--out", al.out, std::string("Default <output-dir>/") + kAlignFile);

  InitArgs in;
  auto* init = app.add_subcommand("init", "Expand embedding (and head) matrices");
  init->add_option("--method", in.method, "random|mean|merge|align")->capture_default_str();
  init->add_option("--source", in.source)->required();
  init->add_option("--target", in.target);
  init->add_option("--expansion", in.expansion);
  init->add_option("--embedding", in.embedding, "Source input embedding (CVEEMB01)")->required();
  init->add_option("--head", in.head, "Source lm_head; omit for tied models");
  init->add_option("--alignment", in.alignment, std::string("Default <output-dir>/") + kAlignFile);
  init->add_option("--weighting", in.weighting, "normalized|raw")->capture_default_str();

  PlanArgs pl;
  auto* plan = app.add_subcommand("plan", "Emit a training plan");
  plan->add_option("--manifest", pl.manifest, "Model manifest JSON");
  plan->add_option("--layers", pl.layers, "Llama-style manifest with this many layers");
  plan->add_option("--hidden", pl.hidden)->capture_default_str();
  plan->add_option("--vocab", pl.vocab);
  plan->add_flag("--tied", pl.tied);
  plan->add_option("--strategy", pl.strategy, "lora|two-stage|2x2ls")->capture_default_str();
  plan->add_option("--objective", pl.objective, "clm|mtp")->capture_default_str();
  plan->add_option("--heads", pl.heads, "Total heads under mtp")->capture_default_str();
  plan->add_option("--seq-len", pl.seq_len)->capture_default_str();
  plan->add_option("--train-rows-from", pl.train_rows_from, "Train only embedding/head rows from this id");
  plan->add_option("--tokens", pl.tokens, "Corpus token count for packing statistics");
  plan->add_option("--batch", pl.batch)->capture_default_str();
  plan->add_option("--out", pl.out, "Default <output-dir>/plan.json");

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Fragmentation and speedup-proxy reports");
  analyze_cmd->add_option("--corpus", an.corpus);
  analyze_cmd->add_option("--source", an.source)->required();
  analyze_cmd->add_option("--target", an.target, std::string("Default <output-dir>/") + kTargetFile);
  analyze_cmd->add_option("--expansion", an.expansion, "Take new ids from this record");
  analyze_cmd->add_option("--generated", an.generated, "Model output text for the output-side ratio");
  analyze_cmd->add_option("--lang", an.langs, "name=path corpus for cross-language fragmentation (repeatable)");
  analyze_cmd->add_option("--baseline-lang", an.baseline_lang);
  analyze_cmd->add_option("--sample", an.sample);

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Run expand (+init) + analyze for each k");
  sweep->add_option("--source", sw.source)->required();
  sweep->add_option("--aux", sw.aux);
  sweep->add_option("--corpus", sw.corpus)->required();
  sweep->add_option("--heldout", sw.heldout, "Evaluation corpus (default: --corpus)");
  sweep->add_option("--k", sw.k)->delimiter(',')->capture_default_str();
  sweep->add_option("--mode", sw.mode)->capture_default_str();
  sweep->add_option("--method", sw.method, "Also initialize matrices per k");
  sweep->add_option("--embedding", sw.embedding);
  sweep->add_option("--head", sw.head);
  sweep->add_option("--rule", sw.rule)->capture_default_str();
  sweep->add_option("--sample", sw.sample);

  GenCorpusArgs gc;
  auto* gen_corpus = app.add_subcommand("gen-corpus", "Write a synthetic corpus");
  gen_corpus->add_option("--kind", gc.kind, "synthetic|english")->capture_default_str();
  gen_corpus->add_option("--lines", gc.lines)->capture_default_str();
  gen_corpus->add_option("--skip", gc.skip, "Discard this many sentences first (held-out splits)");
  gen_corpus->add_option("--out", gc.out);

  GenMatrixArgs gm;
  auto* gen_matrix = app.add_subcommand("gen-matrix", "Write a random N(0, scale^2) matrix");
  gen_matrix->add_option("--tokenizer", gm.tokenizer, "Take the row count from this tokenizer");
  gen_matrix->add_option("--rows", gm.rows);
  gen_matrix->add_option("--dim", gm.dim)->capture_default_str();
  gen_matrix->add_option("--role", gm.role, "embedding|head")->capture_default_str();
  gen_matrix->add_option("--scale", gm.scale)->capture_default_str();
  gen_matrix->add_option("--out", gm.out);

  std::string current;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::string msg = e.what();
    const std::string extra = "INI was not able to parse ";
    if (msg.rfind(extra, 0) == 0) msg = "unknown config key '" + msg.substr(extra.size()) + "'";
    print_error("usage", msg, "");
    return 2;
  }
  try {
    current = app.get_subcommands().front()->get_name();
    if (g.threads > 0) cve::kernels::set_max_threads(g.threads);
    if (train->parsed()) run_train_aux(ta);
    if (expand->parsed()) run_expand(ex);
    if (align->parsed()) run_align(al);
    if (init->parsed()) run_init(in);
    if (plan->parsed()) run_plan(pl);
    if (analyze_cmd->parsed()) run_analyze(an);
    if (sweep->parsed()) run_sweep(sw);
    if (gen_corpus->parsed()) run_gen_corpus(gc);
    if (gen_matrix->parsed()) run_gen_matrix(gm);
  } catch (const cve::Error& e) {
    print_error(e.code(), e.what(), current);
    return 1;
  } catch (const std::exception& e) {
    print_error("internal_error", e.what(), current);
    return 3;
  }
  return 0;
}
