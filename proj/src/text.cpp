#include "cve/text.hpp"

#include <cstdint>

#include "cve/error.hpp"

namespace cve {

namespace {

// Length of the well-formed UTF-8 sequence starting at s[i], or 0.
std::size_t utf8_sequence_length(std::string_view s, std::size_t i) noexcept {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return 1;
  std::size_t len = 0;
  std::uint32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len]) return 0;
  if (cp > 0x10FFFF) return 0;
  if (cp >= 0xD800 && cp <= 0xDFFF) return 0;
  return len;
}

constexpr std::string_view kSpaceMarker = "\xE2\x96\x81";  // U+2581

int hex_value(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void append_hex_escape(std::string& out, unsigned char b) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  out += "\\x";
  out += kDigits[b >> 4];
  out += kDigits[b & 0xF];
}

}  // namespace

std::size_t find_invalid_utf8(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    const std::size_t len = utf8_sequence_length(s, i);
    if (len == 0) return i;
    i += len;
  }
  return std::string_view::npos;
}

std::size_t sanitize_utf8(std::string_view in, std::string& out) {
  out.clear();
  out.reserve(in.size());
  std::size_t replaced = 0;
  std::size_t i = 0;
  bool in_bad_run = false;
  while (i < in.size()) {
    const std::size_t len = utf8_sequence_length(in, i);
    if (len == 0) {
      if (!in_bad_run) {
        out += "\xEF\xBF\xBD";
        ++replaced;
        in_bad_run = true;
      }
      ++i;
      continue;
    }
    in_bad_run = false;
    out.append(in.substr(i, len));
    i += len;
  }
  return replaced;
}

std::string escape_token(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size() + 4);
  std::size_t i = 0;
  while (i < bytes.size()) {
    const std::size_t len = utf8_sequence_length(bytes, i);
    const auto b = static_cast<unsigned char>(bytes[i]);
    if (len == 0) {
      append_hex_escape(out, b);
      ++i;
    } else if (len == 1) {
      if (b == ' ') {
        out += kSpaceMarker;
      } else if (b == '\\') {
        out += "\\\\";
      } else if (b < 0x20 || b == 0x7F) {
        append_hex_escape(out, b);
      } else {
        out += static_cast<char>(b);
      }
      ++i;
    } else {
      const std::string_view seq = bytes.substr(i, len);
      if (seq == kSpaceMarker) {
        for (char c : seq) append_hex_escape(out, static_cast<unsigned char>(c));
      } else {
        out.append(seq);
      }
      i += len;
    }
  }
  return out;
}

std::string unescape_token(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  std::size_t i = 0;
  while (i < escaped.size()) {
    if (escaped[i] == '\\') {
      if (i + 1 >= escaped.size()) throw FormatError("dangling backslash in token string");
      if (escaped[i + 1] == '\\') {
        out += '\\';
        i += 2;
        continue;
      }
      if (escaped[i + 1] != 'x') throw FormatError("unknown escape in token string");
      if (i + 4 > escaped.size()) throw FormatError("truncated \\x escape in token string");
      const int hi = hex_value(escaped[i + 2]);
      const int lo = hex_value(escaped[i + 3]);
      if (hi < 0 || lo < 0) throw FormatError("bad hex digit in token string");
      out += static_cast<char>((hi << 4) | lo);
      i += 4;
    } else if (escaped.substr(i, kSpaceMarker.size()) == kSpaceMarker) {
      out += ' ';
      i += kSpaceMarker.size();
    } else {
      out += escaped[i];
      ++i;
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> split_chunks(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> chunks;
  std::size_t start = 0;
  for (std::size_t i = 1; i < text.size(); ++i) {
    if (text[i] == ' ' && text[i - 1] != ' ') {
      chunks.emplace_back(start, i);
      start = i;
    }
  }
  if (!text.empty()) chunks.emplace_back(start, text.size());
  return chunks;
}

}  // namespace cve
