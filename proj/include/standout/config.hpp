#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "standout/environment.hpp"

namespace standout {

/// Parses {"N","sigma_x2","sigma_e2","v0","m0","x_b","c","quantile_rule"}. Missing keys keep
/// their defaults; wrong types or invalid values throw ConfigError.
EnvironmentParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const EnvironmentParams& p);

/// Reads and parses a JSON config file. Throws ConfigError.
EnvironmentParams load_params(const std::string& path);

/// A config is either EnvironmentParams or, when it carries an "alpha" array, raw primitives
/// {"alpha","sigma_eta2","v0","m0","x_b","c"}.
struct EnvironmentConfig {
    std::optional<EnvironmentParams> params;
    std::optional<Primitives> primitives;

    Environment build() const;
    nlohmann::json to_json() const;
};

EnvironmentConfig config_from_json(const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace standout
