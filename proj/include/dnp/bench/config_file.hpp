#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dnp/config.hpp"

namespace dnp::bench {

// A config text that failed to parse or validate. Each diagnostic is one
// "origin:line: message" string; validation failures use line 0.
class ConfigFileError : public ConfigError {
 public:
  explicit ConfigFileError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

// Sections [topology] [timing] [switch] [link] [rdma] [sim], "key = value"
// lines, '#' or ';' comments. Keys not given keep their defaults. An optional
// "preset" key first in [topology] (shapes, mtnoc, mt2d, torus) selects the
// starting point.
SimConfig parse_config(std::string_view text, std::string_view origin = "<config>");
SimConfig load_config(const std::string& path);

// Every key with its current value, as "section.key" pairs in file order.
std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& cfg);
// The same, in the file format.
std::string to_ini(const SimConfig& cfg);

}  // namespace dnp::bench
