// config.hpp -- run configuration: one JSON document, dotted-path overrides.
#pragma once

#include "lcdual/gamesim.hpp"
#include "lcdual/params.hpp"
#include "lcdual/quadrature.hpp"
#include "lcdual/utility.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace lcdual {

struct UtilitySpec {
    std::string family = "crra"; // "crra" | "log"
    double gamma = 2.0;          // crra only
};

struct RunConfig {
    MarketParams market{};
    AgentParams agent{};
    UtilitySpec utility{};
    QuadratureConfig numerics{};
    int root_max_iter = 200;
    SimConfig sim{};
    std::string output_dir = "out";

    void validate() const;
};

UtilityPtr make_utility(const UtilitySpec& spec);

RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json json_from_file(const std::string& path);

// "sim.seed=7" -> doc["sim"]["seed"] = 7; values parse as JSON when possible,
// otherwise as strings.
void apply_override(nlohmann::json& doc, const std::string& assignment);

RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});

} // namespace lcdual
