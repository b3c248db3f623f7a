// Batch front-end: computes rate-region boundaries, runs Monte Carlo
// campaigns, and executes the acceptance suite. Every emitted number comes
// from the library; this file only parses, dispatches, and writes files.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gmacfb/analysis.hpp"
#include "gmacfb/capacity.hpp"
#include "gmacfb/config.hpp"
#include "gmacfb/model.hpp"
#include "gmacfb/schemes.hpp"
#include "gmacfb/verify.hpp"

namespace {

using namespace gmacfb;

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.output) / name).string();
}

RateRegion make_region(const std::string& kind, const ChannelParams& p, int grid,
                       int rho_grid) {
    if (kind == "gmac") return region_gmac(p);
    if (kind == "gmac_feedback") return region_gmac_feedback(p, rho_grid);
    if (kind == "gmac_dms") return region_gmac_dms(p, rho_grid);
    if (kind == "outer_gmac_wt") return outer_gmac_wt(p, grid);
    if (kind == "outer_gmac_dms") return outer_gmac_dms(p, rho_grid);
    if (kind == "outer_ncsit_dms") return outer_ncsit_dms(p, grid);
    throw std::domain_error("invalid region kind '" + kind + "'");
}

int cmd_region(const RunConfig& cfg) {
    std::vector<std::string> kinds;
    std::string prefix;
    if (!cfg.preset.empty()) {
        prefix = cfg.preset + "_";
        if (cfg.preset == "fig8")
            kinds = {"gmac_feedback", "outer_gmac_wt", "gmac"};
        else if (cfg.preset == "fig10")
            kinds = {"gmac_feedback", "gmac", "outer_ncsit_dms"};
        else if (cfg.preset == "fig13")
            kinds = {"gmac_dms", "outer_gmac_dms", "gmac"};
        else if (cfg.preset == "figNcsitDms")
            kinds = {"outer_ncsit_dms", "gmac_dms"};
    } else if (!cfg.region_kind.empty()) {
        kinds = {cfg.region_kind};
    } else {
        throw std::domain_error("region needs a preset or a region_kind");
    }
    for (const std::string& kind : kinds) {
        const RateRegion r = make_region(kind, cfg.params, cfg.grid, cfg.rho_grid);
        const std::string path = out_path(cfg, prefix + kind + ".csv");
        write_region_csv(r, path);
        std::cout << "wrote " << path << " (" << r.boundary.size() << " points)\n";
    }
    return 0;
}

SchemeConfig scheme_config(const RunConfig& cfg) {
    if (cfg.scheme.empty()) throw std::domain_error("scheme is required");
    SchemeConfig sc;
    sc.scheme = scheme_from_name(cfg.scheme);
    sc.params = cfg.params;
    sc.rho = cfg.rho;
    sc.n = cfg.n;
    const bool absolute = cfg.r1 >= 0.0 || cfg.r2 >= 0.0;
    const bool fractional = cfg.rate_fraction >= 0.0;
    if (absolute == fractional)
        throw std::domain_error("set exactly one of (r1, r2) or rate_fraction");
    if (fractional) {
        const RatePair corner = analytic_corner(sc.scheme, sc.params, sc.rho);
        sc.rate1 = cfg.rate_fraction * corner.r1;
        sc.rate2 = cfg.rate_fraction * corner.r2;
    } else {
        sc.rate1 = std::max(cfg.r1, 0.0);
        sc.rate2 = std::max(cfg.r2, 0.0);
    }
    return sc;
}

TrialBatch run_batch(const RunConfig& cfg, const SchemeConfig& sc) {
    if (cfg.trials < 1) throw std::domain_error("trials must be >= 1");
    TrialBatch b = estimate_error_rate(sc, cfg.trials, cfg.master_seed);
    if (cfg.trials >= 100 && sc.n >= 3)
        b.diagnostics["max_corr"] = independence_diagnostic(sc, cfg.trials, cfg.master_seed);
    if (cfg.trials >= 10000)
        b.diagnostics["max_var_dev"] = variance_validation(sc, cfg.trials, cfg.master_seed);
    return b;
}

int cmd_simulate(const RunConfig& cfg, bool dump_transcript) {
    const SchemeConfig sc = scheme_config(cfg);
    const TrialBatch b = run_batch(cfg, sc);
    const std::string path = out_path(cfg, scheme_name(sc.scheme) + "_batch.csv");
    write_batch_csv(b, path);
    std::cout << "wrote " << path << " (pe_joint " << b.pe_joint() << ")\n";
    if (dump_transcript) {
        const SessionResult r = run_session(sc, {cfg.master_seed, 0});
        const std::string tpath = out_path(cfg, scheme_name(sc.scheme) + "_transcript.csv");
        write_transcript_csv(r.transcript, tpath);
        std::cout << "wrote " << tpath << "\n";
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    std::vector<TrialBatch> rows;
    for (const int n : cfg.sweep_n) {
        RunConfig one = cfg;
        one.n = n;
        rows.push_back(run_batch(one, scheme_config(one)));
    }
    const std::string path = out_path(cfg, cfg.scheme + "_sweep.csv");
    write_batch_csv(rows, path);
    std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    const std::vector<CriterionResult> results = run_acceptance(cfg.only);
    if (results.empty()) {
        std::cerr << "no criterion matches '" << cfg.only << "'\n";
        return 2;
    }
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  [" << r.detail
                  << "]\n";
        all = all && r.pass;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feedback coding schemes and rate regions for Gaussian "
                 "multiple-access wiretap channels"};
    RunConfig cfg;
    std::string config_path;
    bool dump_transcript = false;

    app.add_option("command", cfg.command, "region | simulate | sweep | verify");
    app.add_option("--config", config_path, "key = value config file, applied first");
    // Flags mirror the config-file keys and override them.
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const char* key :
         {"scheme", "preset", "region_kind", "p1", "p2", "sigma1_sq", "sigma2_sq", "q",
          "rho", "n", "r1", "r2", "rate_fraction", "trials", "master_seed", "grid",
          "rho_grid", "sweep_n", "output", "only"}) {
        app.add_option_function<std::string>(
            std::string("--") + key,
            [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); });
    }
    app.add_flag("--dump-transcript", dump_transcript,
                 "also write the first trial's per-time transcript (simulate)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) load_config_file(cfg, config_path);
        // Presets are baselines: apply them before any explicit flag override.
        for (const auto& [key, value] : overrides)
            if (key == "preset") apply_key(cfg, key, value);
        for (const auto& [key, value] : overrides)
            if (key != "preset") apply_key(cfg, key, value);
        if (cfg.command.empty()) throw std::domain_error("command is required");
        cfg.params.validate();
        if (cfg.command == "region") return cmd_region(cfg);
        if (cfg.command == "simulate") return cmd_simulate(cfg, dump_transcript);
        if (cfg.command == "sweep") return cmd_sweep(cfg);
        if (cfg.command == "verify") return cmd_verify(cfg);
        throw std::domain_error("unknown command '" + cfg.command + "'");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
