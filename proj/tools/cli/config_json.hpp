#pragma once

// JSON configuration files for CLI11.  Objects nest by subcommand:
//   {"format": "json", "search": {"g": "u*p1", "order": 1}}

#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace clawkit::cli {

class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("malformed JSON config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("JSON config must be an object");
    std::vector<CLI::ConfigItem> out;
    collect(j, "", {}, out);
    return out;
  }

 private:
  static std::string scalar(const nlohmann::json& v, const std::string& name) {
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) {
      std::ostringstream ss;
      ss.precision(17);
      ss << v.get<double>();
      return ss.str();
    }
    if (v.is_string()) return v.get<std::string>();
    throw CLI::ConversionError("unsupported value for config key " + name);
  }

  static void collect(const nlohmann::json& j, const std::string& name, std::vector<std::string> prefix,
                      std::vector<CLI::ConfigItem>& out) {
    if (j.is_object()) {
      if (!name.empty()) prefix.push_back(name);
      for (auto it = j.begin(); it != j.end(); ++it) collect(*it, it.key(), prefix, out);
      return;
    }
    CLI::ConfigItem item;
    item.name = name;
    item.parents = prefix;
    if (j.is_array()) {
      for (const auto& v : j) item.inputs.push_back(scalar(v, name));
    } else {
      item.inputs.push_back(scalar(j, name));
    }
    out.push_back(std::move(item));
  }
};

}  // namespace clawkit::cli
