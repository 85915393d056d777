#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sea/error.hpp"

namespace sea {

enum class Command { kEvolve, kVerifyGenerator, kOnsager, kSectorCheck, kSeparabilityProbe };
std::string to_string(Command c);
Command command_from_string(const std::string& s);

enum class OutputFormat { kCsv, kJsonl };

struct RunOptions {
  Command command = Command::kEvolve;
  std::filesystem::path scenario;
  std::filesystem::path out_dir;
  std::optional<double> t_final;
  std::optional<double> tau;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::kCsv;
  std::vector<double> times;  // onsager evaluation times; overrides the scenario
};

struct RunManifest {
  std::string scenario_path;
  std::string digest;
  std::string command;
  std::string out_dir;
  std::string kernels;
  double wall_seconds = 0.0;
  std::string termination;
  nlohmann::json verification = nlohmann::json::object();
  std::vector<std::string> artifacts;
  int exit_status = 0;

  nlohmann::json to_json() const;
};

// Runs one command into a fresh output directory (created; must not already
// hold files) and writes manifest.json there. Hard validation failures give
// exit_status 1. Input and module errors are thrown as sea::Error.
RunManifest run(const RunOptions& options);

// {"error": code, "field": path, "detail": text}
nlohmann::json error_json(const Error& e);

// 17 significant digits, '.' separator, locale independent.
std::string format_double(double v);

// Applies SEA_DYN_LOG (trace|debug|info|warn|error|off) to the default logger.
void configure_logging();

}  // namespace sea
