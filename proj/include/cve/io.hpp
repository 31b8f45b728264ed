#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace cve {

// Every JSON artifact carries this in a "format_version" field.
inline constexpr int kFormatVersion = 1;

std::string read_file(const std::filesystem::path& path);  // throws IoError
void write_file(const std::filesystem::path& path, std::string_view contents);

// Parses `text`; syntax errors become FormatError naming `what`.
nlohmann::json parse_json(std::string_view text, std::string_view what);
nlohmann::json read_json_file(const std::filesystem::path& path);  // throws IoError / FormatError
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// Rejects documents whose "format_version" is missing or unsupported.
void check_format_version(const nlohmann::json& j, std::string_view what);

}  // namespace cve
