#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fmslab/floquet.hpp"
#include "fmslab/models.hpp"

namespace fmslab {

// Flat "key = value" text with [section] headers; keys are stored as "section.key".
// '#' and ';' start comments.
class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text);
  static ConfigFile load(const std::filesystem::path& path);  // IoError if unreadable

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void erase(const std::string& key) { values_.erase(key); }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct Diagnostic {
  std::string field;
  std::string message;
};

std::string format_diagnostics(const std::vector<Diagnostic>& diags);

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
  std::string experiment;
  ModelSpec model;
  TrajectorySpec trajectory;
  PropagateOptions propagation;
  std::map<std::string, std::vector<double>> grids;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output_path;
  OutputFormat format = OutputFormat::Csv;
  ConfigFile source;  // everything the user wrote, for echoing and experiment-specific knobs

  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "simulate", "scaling-static", "scaling-dynamic", "disorder", "saito-scan",
      "phantom",  "invariants",     "resurge",         "qgt-map"};
  return names;
}

// Every schema violation, not just the first. Empty means valid.
std::vector<Diagnostic> validate(const ConfigFile& cfg);

// Throws ConfigError carrying all diagnostics when invalid.
ExperimentConfig build_config(const ConfigFile& cfg);

// Grid syntax: "a, b, c" | "linspace lo hi n" | "logspace lo hi n".
std::vector<double> parse_grid(std::string_view text);

}  // namespace fmslab
