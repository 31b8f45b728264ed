#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cve/embedding.hpp"

namespace cve {

// Little-endian binary:
//   8 bytes  magic "CVEEMB01"
//   u32      rows (vocabulary size)
//   u32      dim
//   u8       role (0 input embedding, 1 head)
//   rows*dim float32, row-major
inline constexpr std::string_view kMatrixMagic = "CVEEMB01";
inline constexpr std::size_t kMatrixHeaderSize = 8 + 4 + 4 + 1;

std::string matrix_to_bytes(const EmbeddingMatrix& m);
// Throws FormatError on bad magic, truncation, trailing bytes, overflowing
// sizes, unknown role, zero dim or non-finite entries.
EmbeddingMatrix matrix_from_bytes(std::string_view bytes);

void save_matrix(const std::filesystem::path& path, const EmbeddingMatrix& m);
EmbeddingMatrix load_matrix(const std::filesystem::path& path);

}  // namespace cve
