#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmacfb/model.hpp"

namespace gmacfb {

// One batch run as described by a flat key = value config file (or the
// equivalent command-line flags). Negative r1/r2/rate_fraction mean unset.
struct RunConfig {
    std::string command;  // region | simulate | sweep | verify
    std::string scheme;
    std::string preset;
    std::string region_kind;  // for `region` without a preset
    ChannelParams params;
    double rho = 0.0;
    int n = 20;
    double r1 = -1.0;
    double r2 = -1.0;
    double rate_fraction = -1.0;
    std::int64_t trials = 1000;
    std::uint64_t master_seed = 1;
    int grid = 41;       // per-axis resolution for multi-parameter sweeps
    int rho_grid = 201;  // resolution for single-parameter sweeps
    std::vector<int> sweep_n = {20, 40, 80};
    std::string output = ".";
    std::string only;  // verify: run only criteria whose name contains this
};

// Figure presets are named built-ins; explicit keys override them.
inline ChannelParams preset_params(const std::string& name) {
    ChannelParams p;
    if (name == "fig8") {
        p.p1 = 1.0;
        p.p2 = 1.2;
        p.sigma1_sq = 0.1;
        p.sigma2_sq = 3.0;
        p.q = 0.0;
    } else if (name == "fig10" || name == "figNcsitDms") {
        p.p1 = 10.0;
        p.p2 = 3.0;
        p.sigma1_sq = 10.0;
        p.sigma2_sq = 20.0;
        p.q = 5.0;
    } else if (name == "fig13") {
        p.p1 = 1.0;
        p.p2 = 1.5;
        p.sigma1_sq = 0.1;
        p.sigma2_sq = 1.2;
        p.q = 0.0;
    } else {
        throw std::domain_error("unknown preset '" + name + "'");
    }
    return p;
}

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

// Applies one key = value pair; throws on unknown keys or bad values so
// config typos surface as usage errors.
inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_double = [&] {
        try {
            std::size_t pos = 0;
            const double v = std::stod(value, &pos);
            if (pos != value.size()) throw std::domain_error("");
            return v;
        } catch (const std::exception&) {
            throw std::domain_error("bad number for " + key);
        }
    };
    auto as_int = [&] {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(value, &pos);
            if (pos != value.size()) throw std::domain_error("");
            return v;
        } catch (const std::exception&) {
            throw std::domain_error("bad integer for " + key);
        }
    };
    if (key == "command")
        cfg.command = value;
    else if (key == "scheme")
        cfg.scheme = value;
    else if (key == "preset") {
        cfg.preset = value;
        cfg.params = preset_params(value);
    } else if (key == "region_kind")
        cfg.region_kind = value;
    else if (key == "p1")
        cfg.params.p1 = as_double();
    else if (key == "p2")
        cfg.params.p2 = as_double();
    else if (key == "sigma1_sq")
        cfg.params.sigma1_sq = as_double();
    else if (key == "sigma2_sq")
        cfg.params.sigma2_sq = as_double();
    else if (key == "q")
        cfg.params.q = as_double();
    else if (key == "rho")
        cfg.rho = as_double();
    else if (key == "n")
        cfg.n = static_cast<int>(as_int());
    else if (key == "r1")
        cfg.r1 = as_double();
    else if (key == "r2")
        cfg.r2 = as_double();
    else if (key == "rate_fraction")
        cfg.rate_fraction = as_double();
    else if (key == "trials")
        cfg.trials = as_int();
    else if (key == "master_seed")
        cfg.master_seed = static_cast<std::uint64_t>(as_int());
    else if (key == "grid")
        cfg.grid = static_cast<int>(as_int());
    else if (key == "rho_grid")
        cfg.rho_grid = static_cast<int>(as_int());
    else if (key == "output")
        cfg.output = value;
    else if (key == "only")
        cfg.only = value;
    else if (key == "sweep_n") {
        cfg.sweep_n.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ' '))
            if (!item.empty()) cfg.sweep_n.push_back(std::stoi(item));
        if (cfg.sweep_n.empty()) throw std::domain_error("sweep_n needs at least one value");
    } else
        throw std::domain_error("unknown config key '" + key + "'");
}

// Flat structured-text config: one `key = value` per line, `#` comments.
inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::domain_error("line " + std::to_string(lineno) +
                                    ": expected key = value");
        apply_key(cfg, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
    }
}

}  // namespace gmacfb
