#include "cve/io.hpp"

#include <fstream>
#include <sstream>

#include "cve/error.hpp"

namespace cve {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

nlohmann::json parse_json(std::string_view text, std::string_view what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_file(path), "'" + path.string() + "'");
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  write_file(path, j.dump(1) + "\n");
}

void check_format_version(const nlohmann::json& j, std::string_view what) {
  if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
    throw FormatError(std::string(what) + ": missing integer 'format_version'");
  }
  if (j["format_version"].get<int>() != kFormatVersion) {
    throw FormatError(std::string(what) + ": unsupported format_version " +
                      j["format_version"].dump());
  }
}

}  // namespace cve
