#pragma once

#include "sublin/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <vector>

namespace sublin {

/// Settings for `verify-lemmas`.
struct LemmaSettings {
  int k_max = 256;
  std::size_t grid_points = 10000;
  double uniform_range = 2.0;
};

/// Settings for `solve`: a single (n, m) Galerkin solve. Empty n means n*.
struct SolveSettings {
  std::optional<long long> n;
  std::optional<std::size_t> m;
  int probes = 20;
  int sphere_trials = 1000;
};

/// Parsed configuration file. λ may be given absolutely or as a fraction of λ*;
/// sweeps take `lambda_grid` (absolute) or `lambda_grid_fractions`.
struct ConfigFile {
  RunConfig run;
  bool lambda_given = false;
  std::optional<double> lambda_fraction;
  std::optional<std::vector<double>> lambda_grid;
  std::optional<std::vector<double>> lambda_grid_fractions;
  LemmaSettings lemmas;
  SolveSettings solve;
  nlohmann::json source;  // the document as read
};

/// Throws ConfigError with the offending key for unknown keys, wrong types or invalid values.
ConfigFile parse_config(const nlohmann::json& doc);

/// Throws ConfigError when the file is missing or is not valid JSON.
ConfigFile load_config(const std::filesystem::path& path);

/// Resolves λ (absolute or fraction of λ*) into config.run.lambda. Needs the certificate
/// machinery when a fraction is given.
void resolve_lambda(ConfigFile& config);

/// Canonical JSON form of a run configuration (embedded in run records).
nlohmann::json config_to_json(const RunConfig& config);

ModelDomain parse_domain(const nlohmann::json& doc);
nlohmann::json domain_to_json(const ModelDomain& domain);

}  // namespace sublin
