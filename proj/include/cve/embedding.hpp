#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cve {

enum class MatrixRole : std::uint8_t {
  InputEmbedding = 0,
  LmHead = 1,
};

const char* to_string(MatrixRole role);

// |V| x H single-precision matrix, row-major; row i belongs to token id i.
// Entries are always finite and H > 0.
class EmbeddingMatrix {
public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim, MatrixRole role);
  // Throws InvalidArgument on size mismatch, dim == 0 or non-finite values.
  EmbeddingMatrix(std::size_t rows, std::size_t dim, MatrixRole role, std::vector<float> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  MatrixRole role() const noexcept { return role_; }

  std::span<const float> row(std::size_t i) const;
  std::span<float> row(std::size_t i);
  std::span<const float> data() const noexcept { return data_; }

  // Appends all rows of `other`; dimensions must match.
  void append(const EmbeddingMatrix& other);
  void append_row(std::span<const double> values);  // rounded to float

  // Exact bit-pattern equality of shape, role and every entry.
  bool bitwise_equal(const EmbeddingMatrix& other) const noexcept;

private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  MatrixRole role_ = MatrixRole::InputEmbedding;
  std::vector<float> data_;
};

// Per-dimension mean and population standard deviation over all rows.
struct EmbedStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

EmbedStats embed_stats(const EmbeddingMatrix& m);  // throws InvalidArgument when empty

}  // namespace cve
