#pragma once

// CLI11 config reader for JSON files. Top-level keys are global flags; an
// object-valued key names a subcommand and holds that subcommand's flags.
// Keys use the long flag name; '_' and '-' are interchangeable.

#include <algorithm>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace cvetool {

class JsonConfig : public CLI::Config {
public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    throw CLI::ConversionError("writing JSON config is not supported");
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> out;
    walk(j, {}, out);
    return out;
  }

private:
  static std::string scalar(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config value for '" + key + "' must be a string, number or boolean");
  }

  static void walk(const nlohmann::json& obj, const std::vector<std::string>& parents,
                   std::vector<CLI::ConfigItem>& out) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      std::string key = it.key();
      std::replace(key.begin(), key.end(), '_', '-');
      if (it->is_object()) {
        auto p = parents;
        p.push_back(key);
        walk(*it, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (it->is_array()) {
        for (const auto& v : *it) item.inputs.push_back(scalar(v, key));
      } else {
        item.inputs.push_back(scalar(*it, key));
      }
      out.push_back(std::move(item));
    }
  }
};

}  // namespace cvetool
