#include "cve/matrix_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "cve/error.hpp"
#include "cve/io.hpp"

namespace cve {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + i])) << (8 * i);
  return v;
}

}  // namespace

std::string matrix_to_bytes(const EmbeddingMatrix& m) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() || m.dim() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("matrix too large for the binary format");
  }
  if (m.dim() == 0) throw InvalidArgument("cannot save a matrix with zero columns");
  std::string out(kMatrixMagic);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.dim()));
  out += static_cast<char>(m.role());
  out.reserve(out.size() + m.data().size() * 4);
  for (float f : m.data()) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

EmbeddingMatrix matrix_from_bytes(std::string_view b) {
  if (b.size() < kMatrixHeaderSize) throw FormatError("matrix file truncated in header");
  if (b.substr(0, 8) != kMatrixMagic) throw FormatError("bad magic: not a CVEEMB01 matrix file");
  const std::uint64_t rows = get_u32(b, 8);
  const std::uint64_t dim = get_u32(b, 12);
  const auto role_byte = static_cast<unsigned char>(b[16]);
  if (role_byte > 1) throw FormatError("unknown matrix role " + std::to_string(role_byte));
  if (dim == 0) throw FormatError("matrix has zero columns");
  // rows * dim < 2^64 always; the float count times 4 may not be.
  const std::uint64_t count = rows * dim;
  if (count > (std::numeric_limits<std::uint64_t>::max() - kMatrixHeaderSize) / 4 ||
      count > std::numeric_limits<std::size_t>::max() / 4) {
    throw FormatError("matrix size overflows");
  }
  const std::uint64_t expected = kMatrixHeaderSize + count * 4;
  if (b.size() < expected) {
    throw FormatError("matrix file truncated: " + std::to_string(b.size()) + " bytes, expected " +
                      std::to_string(expected));
  }
  if (b.size() > expected) throw FormatError("trailing bytes after matrix data");
  std::vector<float> data(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_u32(b, kMatrixHeaderSize + 4 * i));
    if (!std::isfinite(data[i])) throw FormatError("non-finite value at entry " + std::to_string(i));
  }
  return EmbeddingMatrix(rows, dim, static_cast<MatrixRole>(role_byte), std::move(data));
}

void save_matrix(const std::filesystem::path& path, const EmbeddingMatrix& m) { write_file(path, matrix_to_bytes(m)); }

EmbeddingMatrix load_matrix(const std::filesystem::path& path) {
  try {
    return matrix_from_bytes(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace cve
