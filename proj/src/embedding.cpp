#include "cve/embedding.hpp"

#include <cmath>
#include <cstring>

#include "cve/error.hpp"
#include "cve/kernels.hpp"

namespace cve {

const char* to_string(MatrixRole role) {
  return role == MatrixRole::LmHead ? "lm_head" : "input_embedding";
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, MatrixRole role)
    : rows_(rows), dim_(dim), role_(role), data_(rows * dim, 0.0f) {
  if (dim == 0) throw InvalidArgument("embedding dimension must be positive");
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, MatrixRole role, std::vector<float> data)
    : rows_(rows), dim_(dim), role_(role), data_(std::move(data)) {
  if (dim == 0) throw InvalidArgument("embedding dimension must be positive");
  if (data_.size() != rows * dim) throw InvalidArgument("embedding data size does not match rows x dim");
  for (float x : data_) {
    if (!std::isfinite(x)) throw InvalidArgument("embedding contains a non-finite value");
  }
}

std::span<const float> EmbeddingMatrix::row(std::size_t i) const {
  if (i >= rows_) throw InvalidArgument("row " + std::to_string(i) + " out of range");
  return std::span<const float>(data_).subspan(i * dim_, dim_);
}

std::span<float> EmbeddingMatrix::row(std::size_t i) {
  if (i >= rows_) throw InvalidArgument("row " + std::to_string(i) + " out of range");
  return std::span<float>(data_).subspan(i * dim_, dim_);
}

void EmbeddingMatrix::append(const EmbeddingMatrix& other) {
  if (other.rows_ == 0) return;
  if (other.dim_ != dim_) throw InvalidArgument("cannot append rows of a different dimension");
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  rows_ += other.rows_;
}

void EmbeddingMatrix::append_row(std::span<const double> values) {
  if (values.size() != dim_) throw InvalidArgument("row has the wrong dimension");
  for (double v : values) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) throw InvalidArgument("initialized row is not finite");
    data_.push_back(f);
  }
  ++rows_;
}

bool EmbeddingMatrix::bitwise_equal(const EmbeddingMatrix& o) const noexcept {
  return rows_ == o.rows_ && dim_ == o.dim_ && role_ == o.role_ &&
         (data_.empty() || std::memcmp(data_.data(), o.data_.data(), data_.size() * sizeof(float)) == 0);
}

EmbedStats embed_stats(const EmbeddingMatrix& m) {
  if (m.rows() == 0) throw InvalidArgument("statistics of an empty embedding matrix");
  auto moments = kernels::column_moments(m.data(), m.rows(), m.dim());
  return {std::move(moments.mean), std::move(moments.stddev)};
}

}  // namespace cve
