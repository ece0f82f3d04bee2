#pragma once

#include <json.hpp>

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fmslab/config.hpp"

namespace fmslab {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless
};

using Cell = std::variant<double, long long, std::string>;

struct DataTable {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
};

struct ExperimentOutput {
  DataTable table;
  nlohmann::json report;
  std::vector<bool> converged;  // one flag per propagated point
};

ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Config entries that do not influence results (worker count, output location) are left out so
// the echo is identical across runs that must produce identical data.
nlohmann::json config_echo(const ConfigFile& cfg);

std::string format_real(double v);  // 17 significant digits
std::string render_csv(const DataTable& table);
std::string render_json(const ExperimentOutput& out, const ConfigFile& cfg,
                        const std::string& experiment);
std::string render(const ExperimentOutput& out, const ExperimentConfig& cfg);

std::string sha256_hex(std::string_view data);

struct RunManifest {
  nlohmann::json config;
  std::string version = kArtifactVersion;
  double wall_time_seconds = 0.0;
  std::vector<bool> converged;
  std::string content_hash;
  std::string data_path;

  nlohmann::json to_json() const;
};

// Runs the experiment, writes the data file and "<data>.manifest.json". With an empty output
// path the data goes to `stdout_sink` instead and no manifest is written.
RunManifest run(const ExperimentConfig& cfg, std::string* stdout_sink = nullptr);

}  // namespace fmslab
