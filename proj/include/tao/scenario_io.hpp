#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tao/chance.hpp"
#include "tao/scenario.hpp"
#include "tao/sim.hpp"

namespace tao {

/// Reads a scenario/config document (JSON, comments allowed). A top-level
/// "include": "<path>" (or list of paths) is loaded first, relative to the
/// including file, and the including file's keys override it recursively.
/// Throws ConfigError with file:line:column context on parse failure.
nlohmann::json load_document(const std::filesystem::path& path);

/// Builds and validates a Scenario. Relative kernel CSV paths resolve against base_dir.
Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

Scenario load_scenario(const std::filesystem::path& path);

struct ExperimentConfig {
  std::filesystem::path source;
  Scenario scenario;
  std::vector<StrategyKind> strategies{StrategyKind::tao, StrategyKind::sota};
  bool tao_guard = false;
  std::map<std::string, double> tao_alpha;  // fixed alphas; solved when empty
  ConfidencePolicy policy;
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  bool plots = true;
  double dt_out_s = 1.0;
  std::size_t histogram_bins = 50;
};

/// Scenario plus the optional "experiment" section.
ExperimentConfig load_experiment(const std::filesystem::path& path);

}  // namespace tao
