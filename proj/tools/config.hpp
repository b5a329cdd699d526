#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "nsp/domain.hpp"
#include "nsp/evolve.hpp"

namespace nsp::cli {

inline constexpr int kSchemaVersion = 1;

struct BackgroundConfig {
  std::string profile = "constant";  ///< constant | mode | bump
  double base = 1.0;
  double amplitude = 0.0;
  int wavenumber = 1;
  Vec3 centre{0.5, 0.5, 0.5};
  double width = 0.2;
};

/// Parsed and validated run description (schema version 1).
struct RunConfig {
  std::string experiment;
  DomainSpec domain;
  double gamma = 5.0 / 3.0;
  double mu = 1.0;
  double lambda = 0.0;
  BackgroundConfig background;
  InitialCondition initial;
  double delta = 1.0;
  SchemeParams scheme;
  std::optional<double> fit_t_min;
  std::optional<double> fit_t_max;
  int verify_samples = 20;
  std::filesystem::path out_dir = "nsp-out";
  bool write_fields = false;
  std::uint64_t seed = 0;
};

bool known_experiment(const std::string& name);

/// Throws Error(ConfigError) on unknown keys, wrong types or inadmissible values.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Complete config with every default filled in; parse_config(echo(c)) == c.
nlohmann::json echo(const RunConfig& config);

}  // namespace nsp::cli
