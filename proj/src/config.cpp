#include "lcdual/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace lcdual {

using nlohmann::json;

void RunConfig::validate() const {
    market.validate();
    agent.validate();
    numerics.validate();
    sim.validate();
    if (utility.family != "crra" && utility.family != "log")
        throw ValidationError("utility.family must be \"crra\" or \"log\"");
    if (root_max_iter < 10) throw ValidationError("root_max_iter must be at least 10");
    if (output_dir.empty()) throw ValidationError("output_dir must not be empty");
}

UtilityPtr make_utility(const UtilitySpec& spec) {
    if (spec.family == "crra") return make_crra(spec.gamma);
    if (spec.family == "log") return make_log();
    throw ValidationError("utility.family must be \"crra\" or \"log\"");
}

namespace {

double want_num(const json& j, const char* section, const char* key) {
    if (!j.contains(key)) {
        std::ostringstream os;
        os << "missing config field " << section << "." << key;
        throw ValidationError(os.str());
    }
    if (!j.at(key).is_number()) {
        std::ostringstream os;
        os << "config field " << section << "." << key << " must be a number";
        throw ValidationError(os.str());
    }
    return j.at(key).get<double>();
}

template <typename T>
void opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

RunConfig config_from_json(const json& doc) {
    RunConfig cfg;
    if (!doc.contains("market")) throw ValidationError("missing config section: market");
    if (!doc.contains("agent")) throw ValidationError("missing config section: agent");
    const json& m = doc.at("market");
    cfg.market = {want_num(m, "market", "r"), want_num(m, "market", "mu"),
                  want_num(m, "market", "sigma"), want_num(m, "market", "delta")};
    const json& a = doc.at("agent");
    cfg.agent = {want_num(a, "agent", "eps1"), want_num(a, "agent", "eps2"),
                 want_num(a, "agent", "kappa1"), want_num(a, "agent", "kappa2")};
    if (doc.contains("utility")) {
        const json& u = doc.at("utility");
        opt(u, "family", cfg.utility.family);
        if (cfg.utility.family == "crra") cfg.utility.gamma = want_num(u, "utility", "gamma");
    }
    if (doc.contains("numerics")) {
        const json& n = doc.at("numerics");
        opt(n, "rel_tol", cfg.numerics.rel_tol);
        opt(n, "abs_tol", cfg.numerics.abs_tol);
        opt(n, "max_refine", cfg.numerics.max_refine);
        opt(n, "tail_cut", cfg.numerics.tail_cut);
        opt(n, "root_max_iter", cfg.root_max_iter);
    }
    if (doc.contains("sim")) {
        const json& s = doc.at("sim");
        opt(s, "n_paths", cfg.sim.n_paths);
        opt(s, "dt", cfg.sim.dt);
        opt(s, "horizon", cfg.sim.horizon);
        opt(s, "seed", cfg.sim.seed);
        opt(s, "antithetic", cfg.sim.antithetic);
        opt(s, "threads", cfg.sim.threads);
        opt(s, "dt_probe", cfg.sim.dt_probe);
        opt(s, "probe_divisor", cfg.sim.probe_divisor);
    }
    opt(doc, "output_dir", cfg.output_dir);
    cfg.validate();
    return cfg;
}

json json_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ValidationError("config file is not valid JSON: " + path);
    return doc;
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ValidationError("override must look like section.key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty())
            throw ValidationError("override has an empty path segment: " + assignment);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    json doc = json_from_file(path);
    for (const auto& ov : overrides) apply_override(doc, ov);
    return config_from_json(doc);
}

} // namespace lcdual
