#include "cve/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>

#include "cve/error.hpp"

namespace cve::kernels {

namespace {

// Rethrows the first exception raised inside a parallel region.
class ExceptionSlot {
public:
  template <class F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
#pragma omp critical(cve_exception_slot)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

private:
  std::exception_ptr error_;
};

void append_alignment(const Encoding& src, const Encoding& tgt, const std::vector<bool>& is_new,
                      AlignRule rule, AlignmentCounts& out) {
  // Both span lists are sorted and tile the same text, so a single forward
  // cursor over the source spans suffices.
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < tgt.size(); ++i) {
    const auto id = tgt.ids[i];
    const ByteSpan span = tgt.spans[i];
    while (cursor < src.size() && src.spans[cursor].end <= span.begin) ++cursor;
    if (id >= is_new.size() || !is_new[id]) continue;
    std::vector<TokenId> mapping;
    for (std::size_t j = cursor; j < src.size() && src.spans[j].begin < span.end; ++j) {
      const ByteSpan s = src.spans[j];
      if (rule == AlignRule::Contain && (s.begin < span.begin || s.end > span.end)) continue;
      mapping.push_back(src.ids[j]);
    }
    if (!mapping.empty()) ++out[id][std::move(mapping)];
  }
}

void merge_counts(AlignmentCounts& into, AlignmentCounts&& from) {
  for (auto& [id, maps] : from) {
    auto& dst = into[id];
    for (auto& [mapping, count] : maps) dst[mapping] += count;
  }
}

void check_shape(std::span<const float> data, std::size_t rows, std::size_t cols) {
  if (data.size() != rows * cols) throw InvalidArgument("matrix data size does not match shape");
}

constexpr std::size_t kMomentBlock = 256;

}  // namespace

int max_threads() { return omp_get_max_threads(); }

void set_max_threads(int n) {
  static const int initial = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : initial);
}

std::vector<std::uint64_t> count_tokens(const BpeTokenizer& tok, std::span<const std::string> corpus) {
  const std::size_t v = tok.size();
  std::vector<std::uint64_t> total(v, 0);
  ExceptionSlot slot;
  const auto n = static_cast<std::int64_t>(corpus.size());
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(v, 0);
#pragma omp for schedule(dynamic, 64) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      slot.run([&] {
        for (auto id : tok.encode_ids(corpus[i])) ++local[id];
      });
    }
#pragma omp critical(cve_count_tokens)
    for (std::size_t id = 0; id < v; ++id) total[id] += local[id];
  }
  slot.rethrow();
  return total;
}

std::vector<std::size_t> tokens_per_sentence(const BpeTokenizer& tok, std::span<const std::string> corpus) {
  std::vector<std::size_t> out(corpus.size(), 0);
  ExceptionSlot slot;
  const auto n = static_cast<std::int64_t>(corpus.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    slot.run([&] { out[i] = tok.count_tokens(corpus[i]); });
  }
  slot.rethrow();
  return out;
}

std::vector<Encoding> encode_corpus(const BpeTokenizer& tok, std::span<const std::string> corpus) {
  std::vector<Encoding> out(corpus.size());
  ExceptionSlot slot;
  const auto n = static_cast<std::int64_t>(corpus.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    slot.run([&] { out[i] = tok.encode(corpus[i]); });
  }
  slot.rethrow();
  return out;
}

AlignmentCounts collect_alignments(std::span<const std::string> corpus, const BpeTokenizer& source,
                                   const BpeTokenizer& target, const std::vector<bool>& is_new,
                                   AlignRule rule) {
  AlignmentCounts total;
  ExceptionSlot slot;
  const auto n = static_cast<std::int64_t>(corpus.size());
#pragma omp parallel
  {
    AlignmentCounts local;
#pragma omp for schedule(dynamic, 64) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      slot.run([&] {
        append_alignment(source.encode(corpus[i]), target.encode(corpus[i]), is_new, rule, local);
      });
    }
#pragma omp critical(cve_collect_alignments)
    merge_counts(total, std::move(local));
  }
  slot.rethrow();
  return total;
}

ColumnMoments column_moments(std::span<const float> data, std::size_t rows, std::size_t cols) {
  check_shape(data, rows, cols);
  if (rows == 0) throw InvalidArgument("column moments of an empty matrix");
  const std::size_t blocks = (rows + kMomentBlock - 1) / kMomentBlock;
  // Per-block partial sums, then an ordered reduction over blocks.
  std::vector<double> partial(blocks * cols, 0.0);
  const auto nb = static_cast<std::int64_t>(blocks);

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < nb; ++b) {
    double* acc = partial.data() + b * cols;
    const std::size_t end = std::min(rows, (b + 1) * kMomentBlock);
    for (std::size_t r = b * kMomentBlock; r < end; ++r) {
      const float* row = data.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) acc[c] += row[c];
    }
  }
  ColumnMoments m;
  m.mean.assign(cols, 0.0);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t c = 0; c < cols; ++c) m.mean[c] += partial[b * cols + c];
  for (auto& x : m.mean) x /= static_cast<double>(rows);

  std::fill(partial.begin(), partial.end(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < nb; ++b) {
    double* acc = partial.data() + b * cols;
    const std::size_t end = std::min(rows, (b + 1) * kMomentBlock);
    for (std::size_t r = b * kMomentBlock; r < end; ++r) {
      const float* row = data.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) {
        const double d = row[c] - m.mean[c];
        acc[c] += d * d;
      }
    }
  }
  m.stddev.assign(cols, 0.0);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t c = 0; c < cols; ++c) m.stddev[c] += partial[b * cols + c];
  for (auto& x : m.stddev) x = std::sqrt(x / static_cast<double>(rows));
  return m;
}

namespace serial {

std::vector<std::uint64_t> count_tokens(const BpeTokenizer& tok, std::span<const std::string> corpus) {
  std::vector<std::uint64_t> counts(tok.size(), 0);
  for (const auto& s : corpus)
    for (auto id : tok.encode_ids(s)) ++counts[id];
  return counts;
}

std::vector<std::size_t> tokens_per_sentence(const BpeTokenizer& tok, std::span<const std::string> corpus) {
  std::vector<std::size_t> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(tok.count_tokens(s));
  return out;
}

std::vector<Encoding> encode_corpus(const BpeTokenizer& tok, std::span<const std::string> corpus) {
  std::vector<Encoding> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) out.push_back(tok.encode(s));
  return out;
}

AlignmentCounts collect_alignments(std::span<const std::string> corpus, const BpeTokenizer& source,
                                   const BpeTokenizer& target, const std::vector<bool>& is_new,
                                   AlignRule rule) {
  AlignmentCounts out;
  for (const auto& s : corpus) append_alignment(source.encode(s), target.encode(s), is_new, rule, out);
  return out;
}

ColumnMoments column_moments(std::span<const float> data, std::size_t rows, std::size_t cols) {
  check_shape(data, rows, cols);
  if (rows == 0) throw InvalidArgument("column moments of an empty matrix");
  ColumnMoments m;
  m.mean.assign(cols, 0.0);
  m.stddev.assign(cols, 0.0);
  // Same blocked summation order as the parallel kernel.
  std::vector<double> acc(cols);
  for (std::size_t b = 0; b * kMomentBlock < rows; ++b) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t r = b * kMomentBlock; r < std::min(rows, (b + 1) * kMomentBlock); ++r)
      for (std::size_t c = 0; c < cols; ++c) acc[c] += data[r * cols + c];
    for (std::size_t c = 0; c < cols; ++c) m.mean[c] += acc[c];
  }
  for (auto& x : m.mean) x /= static_cast<double>(rows);
  for (std::size_t b = 0; b * kMomentBlock < rows; ++b) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t r = b * kMomentBlock; r < std::min(rows, (b + 1) * kMomentBlock); ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        const double d = data[r * cols + c] - m.mean[c];
        acc[c] += d * d;
      }
    for (std::size_t c = 0; c < cols; ++c) m.stddev[c] += acc[c];
  }
  for (auto& x : m.stddev) x = std::sqrt(x / static_cast<double>(rows));
  return m;
}

}  // namespace serial
}  // namespace cve::kernels
