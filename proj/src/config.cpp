#include "standout/config.hpp"

#include <fstream>

#include "standout/errors.hpp"

namespace standout {

EnvironmentParams params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    EnvironmentParams p;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "N") p.N = value.get<int>();
            else if (key == "sigma_x2") p.sigma_x2 = value.get<double>();
            else if (key == "sigma_e2") p.sigma_e2 = value.get<double>();
            else if (key == "v0") p.v0 = value.get<double>();
            else if (key == "m0") p.m0 = value.get<double>();
            else if (key == "x_b") p.x_b = value.get<double>();
            else if (key == "c") p.c = value.get<double>();
            else if (key == "quantile_rule") p.quantile_rule = quantile_rule_from_string(value.get<std::string>());
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return p;
}

nlohmann::json params_to_json(const EnvironmentParams& p) {
    return {{"N", p.N},   {"sigma_x2", p.sigma_x2}, {"sigma_e2", p.sigma_e2},
            {"v0", p.v0}, {"m0", p.m0},             {"x_b", p.x_b},
            {"c", p.c},   {"quantile_rule", to_string(p.quantile_rule)}};
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
}

EnvironmentParams load_params(const std::string& path) {
    return params_from_json(read_json_file(path));
}

EnvironmentConfig config_from_json(const nlohmann::json& j) {
    EnvironmentConfig cfg;
    if (!j.is_object() || !j.contains("alpha")) {
        cfg.params = params_from_json(j);
        return cfg;
    }
    Primitives p;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "alpha") p.alpha = value.get<std::vector<double>>();
            else if (key == "sigma_eta2") p.sigma_eta2 = value.get<double>();
            else if (key == "v0") p.v0 = value.get<double>();
            else if (key == "m0") p.m0 = value.get<double>();
            else if (key == "x_b") p.x_b = value.get<double>();
            else if (key == "c") p.c = value.get<double>();
            else throw ConfigError("unknown primitives key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        (void)Environment(p);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.primitives = std::move(p);
    return cfg;
}

Environment EnvironmentConfig::build() const {
    return params ? Environment(*params) : Environment(*primitives);
}

nlohmann::json EnvironmentConfig::to_json() const {
    if (params) return params_to_json(*params);
    const Primitives& p = *primitives;
    return {{"alpha", p.alpha}, {"sigma_eta2", p.sigma_eta2}, {"v0", p.v0},
            {"m0", p.m0},       {"x_b", p.x_b},               {"c", p.c}};
}

}  // namespace standout
