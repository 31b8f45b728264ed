// Serial reference vs OpenMP kernels on a synthetic corpus.
//   ./bench_kernels --benchmark_filter=count
// Thread count follows OMP_NUM_THREADS; the second argument of each
// benchmark is the thread count used for the parallel variant.

#include <benchmark/benchmark.h>

#include "cve/expand.hpp"
#include "cve/kernels.hpp"
#include "cve/synthetic.hpp"

namespace {

struct Setup {
  std::vector<std::string> corpus;
  cve::BpeTokenizer source;
  cve::ExpansionResult expansion;
  std::vector<bool> fresh;
  std::vector<float> matrix;

  Setup() {
    cve::SyntheticLanguage lang({.seed = 7});
    corpus = lang.sentences(20000);
    source = cve::train_bpe(cve::synthetic_english(3000, 1), {.vocab_size = 1000});
    auto aux = cve::train_bpe(std::span(corpus).first(5000), {.vocab_size = 4000});
    auto sel = cve::select_new_tokens(aux, source.vocab(), std::span(corpus).first(5000), 500);
    expansion = cve::build_target_tokenizer(source, aux, sel.tokens, cve::ClosureMode::Closure);
    fresh.assign(expansion.target.size(), false);
    for (auto id : expansion.added_ids()) fresh[id] = true;
    matrix.resize(50000 * 256);
    for (std::size_t i = 0; i < matrix.size(); ++i) matrix[i] = static_cast<float>((i * 2654435761u) % 1000) / 1000.0f;
  }
};

const Setup& setup() {
  static const Setup s;
  return s;
}

void threads(const benchmark::State& state) { cve::kernels::set_max_threads(static_cast<int>(state.range(0))); }

void BM_count_serial(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(cve::kernels::serial::count_tokens(s.expansion.target, s.corpus));
}
void BM_count_omp(benchmark::State& state) {
  const auto& s = setup();
  threads(state);
  for (auto _ : state) benchmark::DoNotOptimize(cve::kernels::count_tokens(s.expansion.target, s.corpus));
}

void BM_align_serial(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) {
    benchmark::DoNotOptimize(cve::kernels::serial::collect_alignments(s.corpus, s.source, s.expansion.target, s.fresh,
                                                                      cve::AlignRule::Overlap));
  }
}
void BM_align_omp(benchmark::State& state) {
  const auto& s = setup();
  threads(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cve::kernels::collect_alignments(s.corpus, s.source, s.expansion.target, s.fresh, cve::AlignRule::Overlap));
  }
}

void BM_moments_serial(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(cve::kernels::serial::column_moments(s.matrix, 50000, 256));
}
void BM_moments_omp(benchmark::State& state) {
  const auto& s = setup();
  threads(state);
  for (auto _ : state) benchmark::DoNotOptimize(cve::kernels::column_moments(s.matrix, 50000, 256));
}

}  // namespace

BENCHMARK(BM_count_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_count_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_align_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_align_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_moments_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_moments_omp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
