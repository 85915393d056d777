#pragma once

// Scenario files. JSON is canonical; TOML files (by extension) map onto the
// same document. Defaults are applied during parsing and the fully resolved
// document is hashed into the run digest.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sea/dynamics.hpp"
#include "sea/sectors.hpp"

namespace sea {

struct OnsagerSection {
  std::vector<double> times{0.0};
};

struct SectorSection {
  HermitianOperator n_op;
  int index = 0;
  int samples = 10;
};

struct SeparabilitySection {
  ScenarioConfig a;
  ScenarioConfig b;
  SeparabilityMode mode = SeparabilityMode::kTotalEnergy;
  double t_final = 1.0;
  int outputs = 100;
};

struct ScenarioFile {
  std::string source;
  std::optional<ScenarioConfig> config;  // absent when the file has no hamiltonian/rho0
  std::optional<OnsagerSection> onsager;
  std::optional<SectorSection> sector;
  std::optional<SeparabilitySection> separability;
  nlohmann::json resolved;
  std::string digest;

  const ScenarioConfig& require_config() const;
};

// Raw document (JSON, or TOML when the extension is .toml).
nlohmann::json read_scenario_document(const std::filesystem::path& path);

ScenarioFile parse_scenario(const nlohmann::json& doc, const std::string& source = "<memory>");
ScenarioFile load_scenario(const std::filesystem::path& path);

// One scenario block (top level, or separability.A / .B). `prefix` is
// prepended to field names in errors.
ScenarioConfig scenario_config_from_json(const nlohmann::json& doc, const std::string& prefix = "");
nlohmann::json scenario_config_to_json(const ScenarioConfig& config);

std::string sha256_hex(std::string_view data);

}  // namespace sea
