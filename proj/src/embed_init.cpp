#include "cve/embed_init.hpp"

#include <random>
#include <unordered_map>
#include <unordered_set>

#include "cve/error.hpp"

namespace cve {

namespace {

using Row = std::vector<double>;

void check_context(const InitContext& ctx) {
  if (ctx.rows.rows() != ctx.source.size()) {
    throw InvalidArgument("matrix has " + std::to_string(ctx.rows.rows()) + " rows but the source vocabulary has " +
                          std::to_string(ctx.source.size()) + " tokens");
  }
  if (ctx.rows.dim() == 0) throw InvalidArgument("matrix has zero columns");
}

void check_id(const InitContext& ctx, TokenId id) {
  if (id >= ctx.target.size()) throw InvalidArgument("token id " + std::to_string(id) + " not in target");
}

void add_row(Row& acc, std::span<const float> r, double w = 1.0) {
  for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += w * static_cast<double>(r[d]);
}

Row mean_of(const EmbeddingMatrix& m, std::span<const TokenId> ids) {
  Row acc(m.dim(), 0.0);
  for (auto id : ids) add_row(acc, m.row(id));
  const auto n = static_cast<double>(ids.size());
  for (auto& x : acc) x /= n;
  return acc;
}

Row mean_row(const InitContext& ctx, TokenId id) {
  const auto ids = ctx.source.encode_ids(ctx.target.vocab().token(id));
  if (ids.empty()) throw InternalError("source tokenizer produced no tokens for a non-empty token");
  return mean_of(ctx.rows, ids);
}

EmbeddingMatrix collect(const InitContext& ctx, std::span<const TokenId> ids, auto&& row_of) {
  EmbeddingMatrix out(0, ctx.rows.dim(), ctx.rows.role());
  for (auto id : ids) {
    check_id(ctx, id);
    const Row r = row_of(id);
    out.append_row(r);
  }
  return out;
}

class MergeWalker {
public:
  explicit MergeWalker(const InitContext& ctx) : ctx_(ctx) {}

  const Row& row(TokenId id) {
    if (auto it = memo_.find(id); it != memo_.end()) return it->second;
    if (!active_.insert(id).second) throw InternalError("cycle in the merge graph at id " + std::to_string(id));
    Row r;
    if (id < ctx_.source.size()) {
      r.assign(ctx_.rows.row(id).begin(), ctx_.rows.row(id).end());
    } else if (auto rank = ctx_.target.producer_rank(id)) {
      const auto& m = ctx_.target.merges()[*rank];
      r = row(m.left);  // copy: the memo may rehash on the next call
      const Row& right = row(m.right);
      for (std::size_t d = 0; d < r.size(); ++d) r[d] = (r[d] + right[d]) / 2.0;
    } else {
      r = mean_row(ctx_, id);
    }
    active_.erase(id);
    return memo_.emplace(id, std::move(r)).first->second;
  }

private:
  const InitContext& ctx_;
  std::unordered_map<TokenId, Row> memo_;
  std::unordered_set<TokenId> active_;
};

}  // namespace

EmbeddingMatrix init_random(const EmbedStats& stats, std::size_t n, std::uint64_t seed, MatrixRole role) {
  const auto dim = stats.mean.size();
  if (dim == 0 || stats.stddev.size() != dim) throw InvalidArgument("malformed embedding statistics");
  for (auto s : stats.stddev) {
    if (!(s >= 0.0)) throw InvalidArgument("negative or NaN standard deviation");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  EmbeddingMatrix out(0, dim, role);
  Row r(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) r[d] = stats.mean[d] + stats.stddev[d] * normal(rng);
    out.append_row(r);
  }
  return out;
}

EmbeddingMatrix init_mean(const InitContext& ctx, std::span<const TokenId> ids) {
  check_context(ctx);
  return collect(ctx, ids, [&](TokenId id) { return mean_row(ctx, id); });
}

EmbeddingMatrix init_merge(const InitContext& ctx, std::span<const TokenId> ids) {
  check_context(ctx);
  MergeWalker walker(ctx);
  return collect(ctx, ids, [&](TokenId id) { return walker.row(id); });
}

AlignWeighting align_weighting_from_string(const std::string& s) {
  if (s == "normalized") return AlignWeighting::Normalized;
  if (s == "raw") return AlignWeighting::Raw;
  throw InvalidArgument("unknown align weighting '" + s + "' (expected normalized|raw)");
}

const char* to_string(AlignWeighting w) { return w == AlignWeighting::Normalized ? "normalized" : "raw"; }

EmbeddingMatrix init_align(const InitContext& ctx, const AlignmentTable& table, std::span<const TokenId> ids,
                           AlignWeighting weighting) {
  check_context(ctx);
  return collect(ctx, ids, [&](TokenId id) {
    const auto* maps = table.find(id);
    if (!maps || maps->empty()) return mean_row(ctx, id);
    const double total = weighting == AlignWeighting::Normalized ? static_cast<double>(table.total(id)) : 1.0;
    Row acc(ctx.rows.dim(), 0.0);
    for (const auto& [src, count] : *maps) {
      for (auto s : src) {
        if (s >= ctx.source.size()) throw InvalidArgument("alignment references a non-source id");
      }
      const Row m = mean_of(ctx.rows, src);
      const double w = static_cast<double>(count) / total;
      for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += w * m[d];
    }
    return acc;
  });
}

const char* to_string(InitMethod::Kind kind) {
  switch (kind) {
    case InitMethod::Kind::Random: return "random";
    case InitMethod::Kind::Mean: return "mean";
    case InitMethod::Kind::Merge: return "merge";
    case InitMethod::Kind::Align: return "align";
    case InitMethod::Kind::External: return "external";
  }
  return "?";
}

InitMethod::Kind init_kind_from_string(const std::string& s) {
  for (auto k : {InitMethod::Kind::Random, InitMethod::Kind::Mean, InitMethod::Kind::Merge, InitMethod::Kind::Align,
                 InitMethod::Kind::External}) {
    if (s == to_string(k)) return k;
  }
  throw InvalidArgument("unknown init method '" + s + "' (expected random|mean|merge|align)");
}

std::uint64_t head_seed(std::uint64_t seed) noexcept { return seed ^ 0x9E3779B97F4A7C15ULL; }

namespace {

EmbeddingMatrix extend_one(const EmbeddingMatrix& base, const InitMethod& method, std::uint64_t seed,
                           const BpeTokenizer& source, const ExpansionResult& expansion) {
  const auto ids = expansion.added_ids();
  const InitContext ctx{base, source, expansion.target};
  EmbeddingMatrix rows;
  switch (method.kind) {
    case InitMethod::Kind::Random:
      rows = init_random(embed_stats(base), ids.size(), seed, base.role());
      break;
    case InitMethod::Kind::Mean:
      rows = init_mean(ctx, ids);
      break;
    case InitMethod::Kind::Merge:
      rows = init_merge(ctx, ids);
      break;
    case InitMethod::Kind::Align:
      if (!method.table) throw InvalidArgument("align initialization needs an alignment table");
      rows = init_align(ctx, *method.table, ids, method.weighting);
      break;
    case InitMethod::Kind::External:
      if (!method.external) throw InvalidArgument("external initialization needs a hook");
      rows = method.external(ctx, ids);
      break;
  }
  if (rows.rows() != ids.size() || rows.dim() != base.dim()) {
    throw InvalidArgument("initializer returned a " + std::to_string(rows.rows()) + "x" + std::to_string(rows.dim()) +
                          " block, expected " + std::to_string(ids.size()) + "x" + std::to_string(base.dim()));
  }
  EmbeddingMatrix out = base;
  out.append(rows);
  return out;
}

}  // namespace

ExpandedMatrices expand_matrices(const EmbeddingMatrix& embedding, const std::optional<EmbeddingMatrix>& head,
                                 bool tied, const InitMethod& method, const BpeTokenizer& source,
                                 const ExpansionResult& expansion) {
  if (tied && head) throw InvalidArgument("a head matrix was given for a tied model");
  if (!tied && !head) throw InvalidArgument("an untied model needs its head matrix");
  if (expansion.source_vocab_size != source.size()) {
    throw InvalidArgument("expansion was built from a different source tokenizer");
  }
  if (embedding.rows() != source.size()) {
    throw InvalidArgument("embedding has " + std::to_string(embedding.rows()) + " rows, source vocabulary has " +
                          std::to_string(source.size()));
  }
  if (embedding.role() != MatrixRole::InputEmbedding) throw InvalidArgument("embedding matrix has the head role");
  if (head) {
    if (head->rows() != embedding.rows() || head->dim() != embedding.dim()) {
      throw InvalidArgument("head shape does not match the embedding");
    }
    if (head->role() != MatrixRole::LmHead) throw InvalidArgument("head matrix has the embedding role");
  }
  ExpandedMatrices out;
  out.embedding = extend_one(embedding, method, method.seed, source, expansion);
  if (head) out.head = extend_one(*head, method, head_seed(method.seed), source, expansion);
  return out;
}

}  // namespace cve
