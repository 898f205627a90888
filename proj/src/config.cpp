#include "eigenlocal/config.hpp"

#include <cstdio>
#include <set>

#include <json.hpp>

#include "eigenlocal/errors.hpp"
#include "eigenlocal/sweep.hpp"

namespace eigenlocal {

namespace {

using nlohmann::json;

const std::set<std::string> kKeys{"family", "h",        "h_list",     "target_edge", "k",      "tol", "seed",
                                  "mode_selector", "boundary", "output_dir", "input_dir", "modes"};

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double positive_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ValidationError("config key '" + key + "' must be a number");
    return v.get<double>();
}

std::size_t count(const json& v, const std::string& key) {
    if (!v.is_number_unsigned()) throw ValidationError("config key '" + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

std::vector<std::size_t> index_list(const json& v, const std::string& key) {
    if (v.is_number_unsigned()) return {v.get<std::size_t>()};
    if (!v.is_array()) throw ValidationError("config key '" + key + "' must be an integer or an array of integers");
    std::vector<std::size_t> out;
    for (const auto& e : v) out.push_back(count(e, key));
    return out;
}

std::string text(const json& v, const std::string& key) {
    if (!v.is_string()) throw ValidationError("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

void check_common(const RunConfig& cfg) {
    if (!(cfg.target_edge > 0.0)) throw ParameterError("target_edge must be positive");
    if (cfg.k < 1) throw ParameterError("k must be at least 1");
    if (!(cfg.tol >= 1e-12 && cfg.tol <= 1e-4)) throw ParameterError("tol = " + num(cfg.tol) + " outside [1e-12, 1e-4]");
}

void check_h(double h, DomainFamily family) {
    const double hmax = max_aperture(family);
    if (!(h > 0.0 && h < hmax)) {
        throw ParameterError("h = " + num(h) + " outside (0, " + num(hmax) + ") for " + std::string(to_string(family)));
    }
}

}  // namespace

SolveOptions RunConfig::solve_options() const {
    SolveOptions o;
    o.target_edge = target_edge;
    o.k = k;
    o.tol = tol;
    o.seed = seed;
    o.boundary = boundary;
    return o;
}

std::vector<double> RunConfig::sweep_h_list() const { return h_list.empty() ? default_h_list() : h_list; }

RunConfig apply_config_json(const std::string& source, RunConfig cfg) {
    json j;
    try {
        j = json::parse(source);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (!kKeys.count(key)) throw ValidationError("unknown config key '" + key + "'");
        try {
            if (key == "family") cfg.family = parse_family(text(v, key));
            else if (key == "h") cfg.h = v.is_null() ? std::nullopt : std::optional<double>(positive_number(v, key));
            else if (key == "h_list") {
                if (!v.is_array()) throw ValidationError("config key 'h_list' must be an array of numbers");
                cfg.h_list.clear();
                for (const auto& e : v) cfg.h_list.push_back(positive_number(e, key));
            } else if (key == "target_edge") cfg.target_edge = positive_number(v, key);
            else if (key == "k") cfg.k = count(v, key);
            else if (key == "tol") cfg.tol = positive_number(v, key);
            else if (key == "seed") {
                if (!v.is_number_unsigned()) throw ValidationError("config key 'seed' must be a non-negative integer");
                cfg.seed = v.get<std::uint64_t>();
            } else if (key == "mode_selector") cfg.mode_selector = index_list(v, key);
            else if (key == "boundary") cfg.boundary = parse_boundary(text(v, key));
            else if (key == "output_dir") cfg.output_dir = text(v, key);
            else if (key == "input_dir") cfg.input_dir = text(v, key);
            else if (key == "modes") cfg.modes = index_list(v, key);
        } catch (const ParameterError& e) {
            throw ValidationError(e.what());
        }
    }
    return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["family"] = std::string(to_string(cfg.family));
    j["h"] = cfg.h ? nlohmann::ordered_json(*cfg.h) : nlohmann::ordered_json(nullptr);
    j["h_list"] = cfg.h_list;
    j["target_edge"] = cfg.target_edge;
    j["k"] = cfg.k;
    j["tol"] = cfg.tol;
    j["seed"] = cfg.seed;
    j["mode_selector"] = cfg.mode_selector;
    j["boundary"] = std::string(to_string(cfg.boundary));
    j["output_dir"] = cfg.output_dir;
    j["input_dir"] = cfg.input_dir;
    j["modes"] = cfg.modes;
    return j.dump(2);
}

void validate_for_eigs(const RunConfig& cfg) {
    if (!cfg.h) throw ValidationError("eigs needs a single h");
    check_h(*cfg.h, cfg.family);
    check_common(cfg);
}

void validate_for_sweep(const RunConfig& cfg) {
    const std::vector<double> hs = cfg.sweep_h_list();
    if (hs.size() < 3) throw ArityError("sweep needs at least 3 h values for the power-law fit, got " +
                                        std::to_string(hs.size()));
    for (double h : hs) check_h(h, cfg.family);
    if (cfg.mode_selector.empty()) throw ValidationError("mode_selector must not be empty");
    for (std::size_t s : cfg.mode_selector)
        if (s == 0) throw ValidationError("mode_selector entries are 1-based skew ranks");
    check_common(cfg);
}

}  // namespace eigenlocal
