#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "cve/alignment.hpp"
#include "cve/bpe.hpp"
#include "cve/embedding.hpp"
#include "cve/expand.hpp"

namespace cve {

// What every informed initializer needs: the matrix whose rows are being
// extended (input embedding or head, indexed by source id) and both
// tokenizers. Target ids below source.size() are the source tokens.
struct InitContext {
  const EmbeddingMatrix& rows;
  const BpeTokenizer& source;
  const BpeTokenizer& target;
};

// n rows with entry (i, d) ~ N(mean[d], stddev[d]^2), generated row by row
// from one mt19937_64 stream. A zero stddev yields exactly the mean.
EmbeddingMatrix init_random(const EmbedStats& stats, std::size_t n, std::uint64_t seed,
                            MatrixRole role = MatrixRole::InputEmbedding);

// Row of target token t = average of the source rows of encode(source, t).
EmbeddingMatrix init_mean(const InitContext& ctx, std::span<const TokenId> ids);

// Row of t = (row(left) + row(right)) / 2 along the target merge that
// produces t, recursively; source tokens are leaves. Tokens no merge produces
// fall back to init_mean.
EmbeddingMatrix init_merge(const InitContext& ctx, std::span<const TokenId> ids);

enum class AlignWeighting {
  Normalized,  // counts divided by their total: a convex combination
  Raw,         // counts used as-is; row magnitude grows with corpus size
};

AlignWeighting align_weighting_from_string(const std::string& s);  // throws InvalidArgument
const char* to_string(AlignWeighting w);

// Row of t = sum over the table's mappings m of w_m * mean(source rows of m).
// Tokens absent from the table fall back to init_mean.
EmbeddingMatrix init_align(const InitContext& ctx, const AlignmentTable& table, std::span<const TokenId> ids,
                           AlignWeighting weighting = AlignWeighting::Normalized);

// Plug-in point for initializers that need resources outside this library
// (e.g. auxiliary embeddings trained elsewhere). Must return ids.size() rows
// of ctx.rows.dim() columns.
using ExternalInit = std::function<EmbeddingMatrix(const InitContext& ctx, std::span<const TokenId> ids)>;

struct InitMethod {
  enum class Kind { Random, Mean, Merge, Align, External };

  Kind kind = Kind::Mean;
  std::uint64_t seed = 0;                      // Random
  std::shared_ptr<const AlignmentTable> table;  // Align
  AlignWeighting weighting = AlignWeighting::Normalized;
  ExternalInit external;                        // External

  static InitMethod random(std::uint64_t seed) { return with(Kind::Random, [&](InitMethod& m) { m.seed = seed; }); }
  static InitMethod mean() { return with(Kind::Mean, [](InitMethod&) {}); }
  static InitMethod merge() { return with(Kind::Merge, [](InitMethod&) {}); }
  static InitMethod align(std::shared_ptr<const AlignmentTable> table,
                          AlignWeighting w = AlignWeighting::Normalized) {
    return with(Kind::Align, [&](InitMethod& m) {
      m.table = std::move(table);
      m.weighting = w;
    });
  }
  static InitMethod external_hook(ExternalInit fn) {
    return with(Kind::External, [&](InitMethod& m) { m.external = std::move(fn); });
  }

private:
  static InitMethod with(Kind kind, auto&& set) {
    InitMethod m;
    m.kind = kind;
    set(m);
    return m;
  }
};

const char* to_string(InitMethod::Kind kind);
InitMethod::Kind init_kind_from_string(const std::string& s);  // throws InvalidArgument

struct ExpandedMatrices {
  EmbeddingMatrix embedding;
  std::optional<EmbeddingMatrix> head;  // absent when tied
};

// Copies every source row unchanged and appends one row per added target
// token (new tokens, then intermediates) using `method`. The head, when the
// model is untied, is initialized independently from its own rows; Random
// draws it from a stream seeded with a value derived from `method.seed`.
ExpandedMatrices expand_matrices(const EmbeddingMatrix& embedding, const std::optional<EmbeddingMatrix>& head,
                                 bool tied, const InitMethod& method, const BpeTokenizer& source,
                                 const ExpansionResult& expansion);

// Seed used for the head stream under Random.
std::uint64_t head_seed(std::uint64_t seed) noexcept;

}  // namespace cve
