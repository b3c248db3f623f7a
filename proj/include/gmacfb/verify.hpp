#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gmacfb/analysis.hpp"
#include "gmacfb/capacity.hpp"
#include "gmacfb/config.hpp"
#include "gmacfb/model.hpp"
#include "gmacfb/schemes.hpp"

namespace gmacfb {

struct CriterionResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace verify_detail {

constexpr std::uint64_t kSeed = 0x5eedULL;

inline double uniform_in(std::uint64_t& state, double lo, double hi) {
    state = rng::mix64(state);
    return lo + (hi - lo) * rng::uniform_open(state);
}

// Monte Carlo configurations for the scheme-level criteria. Two-user schemes
// run at the fixed-point rate pair scaled back; split schemes at their
// power-split corner scaled back.
inline SchemeConfig mc_config(Scheme s, int n) {
    SchemeConfig cfg;
    cfg.scheme = s;
    cfg.n = n;
    switch (s) {
        case Scheme::sk_p2p:
            cfg.params = {1.0, 0.0, 1.0, 0.0, 0.0};
            cfg.rate1 = 0.4;
            break;
        case Scheme::ozarow:
            cfg.params = {1.0, 1.0, 1.0, 3.0, 0.0};
            break;
        case Scheme::rosenzweig_ncsit:
            cfg.params = preset_params("fig10");
            break;
        case Scheme::twostep_dms:
            cfg.params = {1.0, 1.0, 1.0, 3.0, 0.0};
            cfg.rho = 0.5;
            break;
        case Scheme::hybrid_ncsit_dms:
            cfg.params = preset_params("fig10");
            cfg.rho = 0.5;
            break;
    }
    if (s != Scheme::sk_p2p) {
        const double frac =
            (s == Scheme::ozarow || s == Scheme::twostep_dms) ? 0.8 : 0.7;
        const RatePair corner = analytic_corner(s, cfg.params, cfg.rho);
        cfg.rate1 = frac * corner.r1;
        cfg.rate2 = frac * corner.r2;
    }
    return cfg;
}

inline bool boundary_contained(const RateRegion& inner, const RateRegion& outer,
                               double tol) {
    for (const auto& p : inner.boundary)
        if (!region_contains(outer, p, tol)) return false;
    return true;
}

inline bool strictly_exceeds(const RateRegion& big, const RateRegion& small) {
    for (const auto& p : big.boundary)
        if (!region_contains(small, p, 1e-6)) return true;
    return false;
}

}  // namespace verify_detail

inline CriterionResult criterion_fixed_point() {
    using namespace verify_detail;
    std::ostringstream d;
    bool ok = true;
    std::uint64_t st = kSeed;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        ChannelParams p;
        p.p1 = uniform_in(st, 0.1, 10.0);
        p.p2 = uniform_in(st, 0.1, 10.0);
        p.sigma1_sq = uniform_in(st, 0.05, 10.0);
        const double rs = solve_rho_star(p);
        const double rhs = (p.sigma1_sq + p.p1 * (1.0 - rs * rs)) *
                           (p.sigma1_sq + p.p2 * (1.0 - rs * rs));
        worst = std::max(worst, std::abs(rho_star_residual(p, rs)) / rhs);
    }
    ok = ok && worst < 1e-10;
    d << "max relative residual " << worst;

    ChannelParams unit{1.0, 1.0, 1.0, 0.0, 0.0};
    const double rs = solve_rho_star(unit);
    ok = ok && rs > 0.30 && rs < 0.32;
    const SchemeCoefficients c = coeffs_ozarow(unit, 500);
    const double gap = std::abs(std::abs(c.rho_seq[500]) - rs);
    ok = ok && gap < 1e-6;
    d << "; unit root " << rs << ", recursion gap " << gap;
    return {"fixed_point", ok, d.str()};
}

inline CriterionResult criterion_sum_rate_identity() {
    using namespace verify_detail;
    std::uint64_t st = kSeed + 1;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        ChannelParams p;
        p.p1 = uniform_in(st, 0.1, 10.0);
        p.p2 = uniform_in(st, 0.1, 10.0);
        p.sigma1_sq = uniform_in(st, 0.05, 10.0);
        for (int j = 0; j <= 10; ++j) {
            const double rho = j / 10.0;
            const RatePair c = dms_corner(p, rho);
            const double sum = half_log2_1p(
                (p.p1 + p.p2 + 2.0 * std::sqrt(p.p1 * p.p2) * rho) / p.sigma1_sq);
            worst = std::max(worst, std::abs(c.r1 + c.r2 - sum));
        }
    }
    std::ostringstream d;
    d << "max identity gap " << worst;
    return {"sum_rate_identity", worst < 1e-12, d.str()};
}

inline CriterionResult criterion_region_containment() {
    using namespace verify_detail;
    std::ostringstream d;
    bool ok = true;
    const double tol = 1e-9;
    for (const std::string preset : {"fig8", "fig10", "fig13", "figNcsitDms"}) {
        const ChannelParams p = preset_params(preset);
        const RateRegion wt = outer_gmac_wt(p, 41);
        const RateRegion g = region_gmac(p);
        const RateRegion f = region_gmac_feedback(p, 201);
        const RateRegion od = outer_gmac_dms(p, 201);
        const RateRegion gd = region_gmac_dms(p, 201);
        bool local = boundary_contained(wt, g, tol) && boundary_contained(g, f, tol) &&
                     boundary_contained(od, gd, tol);
        if (p.q > 0.0) {
            const RateRegion on = outer_ncsit_dms(p, 41);
            local = local && boundary_contained(on, gd, tol);
            local = local && strictly_exceeds(f, on) && strictly_exceeds(gd, on);
        } else {
            local = local && strictly_exceeds(f, wt) && strictly_exceeds(gd, od);
        }
        if (!local) {
            ok = false;
            d << preset << " failed; ";
        }
    }
    if (ok) d << "all preset containments and enhancements hold";
    return {"region_containment", ok, d.str()};
}

inline CriterionResult criterion_sk_p2p_bound() {
    using namespace verify_detail;
    const SchemeConfig cfg = mc_config(Scheme::sk_p2p, 20);
    const double bound = pe_bound_sk(1.0, 1.0, 20, 0.4);
    const TrialBatch b = estimate_error_rate(cfg, 10000, kSeed + 2);
    const double vdev = variance_validation(cfg, 100000, kSeed + 3);
    std::ostringstream d;
    d << "bound " << bound << ", observed errors " << b.error_count_1 << "/" << b.trials
      << ", max var dev " << vdev;
    const bool ok = bound < 1e-6 && b.error_count_1 == 0 && vdev < 0.05;
    return {"sk_p2p_bound", ok, d.str()};
}

inline CriterionResult criterion_scheme_error_decay() {
    using namespace verify_detail;
    std::ostringstream d;
    bool ok = true;
    for (const Scheme s : {Scheme::ozarow, Scheme::rosenzweig_ncsit, Scheme::twostep_dms,
                           Scheme::hybrid_ncsit_dms}) {
        double prev_pe = -1.0, prev_half = 0.0;
        for (const int n : {40, 60}) {
            const TrialBatch b = estimate_error_rate(mc_config(s, n), 2000, kSeed + 4);
            const double pe = b.pe_joint();
            const WilsonInterval w = wilson95(b.error_count_joint, b.trials);
            const double half = 0.5 * (w.hi - w.lo);
            if (pe >= 0.02) ok = false;
            if (prev_pe >= 0.0 && pe > prev_pe + prev_half) ok = false;
            d << scheme_name(s) << " n=" << n << " pe=" << pe << "; ";
            prev_pe = pe;
            prev_half = half;
        }
    }
    return {"scheme_error_decay", ok, d.str()};
}

inline CriterionResult criterion_secrecy_structure() {
    using namespace verify_detail;
    std::ostringstream d;
    bool ok = true;
    const std::int64_t trials = 100000;
    const double thresh = 5.0 / std::sqrt(static_cast<double>(trials));
    for (const Scheme s : {Scheme::sk_p2p, Scheme::ozarow, Scheme::rosenzweig_ncsit,
                           Scheme::twostep_dms, Scheme::hybrid_ncsit_dms}) {
        SchemeConfig cfg = mc_config(s, 20);
        const double mc = independence_diagnostic(cfg, trials, kSeed + 5);
        if (mc > thresh) ok = false;
        d << scheme_name(s) << " corr " << mc << "; ";
    }
    for (const std::string preset : {"fig8", "fig10", "fig13"}) {
        const ChannelParams p = preset_params(preset);
        const double lb = leakage_bound(p, 1000);
        const double lb2 = leakage_bound(p, 2000);
        if (lb >= 0.005 || std::abs(lb2 - 0.5 * lb) > 1e-15) ok = false;
        d << preset << " leak " << lb << "; ";
    }
    return {"secrecy_structure", ok, d.str()};
}

inline CriterionResult criterion_state_precancellation() {
    using namespace verify_detail;
    std::ostringstream d;
    bool ok = true;
    for (const Scheme s : {Scheme::rosenzweig_ncsit, Scheme::hybrid_ncsit_dms}) {
        for (const double q : {1.0, 5.0}) {
            SchemeConfig cfg = mc_config(s, 40);
            cfg.params.q = q;
            const double dev = state_invariance_check(cfg, 100, kSeed + 6);
            if (dev >= 1e-9) ok = false;
            d << scheme_name(s) << " q=" << q << " dev " << dev << "; ";
        }
    }
    // Zero state variance must collapse onto the stateless schemes bit by bit.
    {
        for (std::uint64_t trial = 0; trial < 50; ++trial) {
            const TrialSeed seed{kSeed + 7, trial};
            SchemeConfig rz = mc_config(Scheme::rosenzweig_ncsit, 40);
            rz.params.q = 0.0;
            const SessionResult a = run_rosenzweig_ncsit(rz.params, rz.n, rz.rate1,
                                                         rz.rate2, seed);
            const SessionResult b =
                run_ozarow(rz.params, rz.n, rz.rate1, rz.rate2, seed);
            if (!identical_bits(a.transcript, b.transcript)) ok = false;

            SchemeConfig hy = mc_config(Scheme::hybrid_ncsit_dms, 40);
            hy.params.q = 0.0;
            const SessionResult c = run_hybrid_ncsit_dms(hy.params, hy.rho, hy.n,
                                                         hy.rate1, hy.rate2, seed);
            const SessionResult e =
                run_twostep_dms(hy.params, hy.rho, hy.n, hy.rate1, hy.rate2, seed);
            if (!identical_bits(c.transcript, e.transcript)) ok = false;
        }
        d << "q=0 reductions bit-exact: " << (ok ? "yes" : "no");
    }
    return {"state_precancellation", ok, d.str()};
}

inline CriterionResult criterion_coefficient_recursions() {
    using namespace verify_detail;
    std::ostringstream d;
    bool ok = true;
    for (const Scheme s : {Scheme::ozarow, Scheme::twostep_dms, Scheme::hybrid_ncsit_dms}) {
        SchemeConfig cfg = mc_config(s, 25);
        const double dev = variance_validation(cfg, 100000, kSeed + 8);
        if (dev >= 0.05) ok = false;
        d << scheme_name(s) << " var dev " << dev << "; ";
    }
    // Closed form of the common-stream variance against the iterated ratio.
    {
        std::uint64_t st = kSeed + 9;
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            ChannelParams p;
            p.p1 = uniform_in(st, 0.1, 10.0);
            p.p2 = uniform_in(st, 0.1, 10.0);
            p.sigma1_sq = uniform_in(st, 0.05, 10.0);
            const double rho = uniform_in(st, 0.0, 0.95);
            const int n = 30;
            const SchemeCoefficients c = coeffs_dms(p, rho, n);
            const double closed = std::pow(c.r_sq / (c.r_sq + c.p_star), n - 2) * c.r_sq /
                                  (12.0 * c.p_star);
            worst = std::max(worst, std::abs(c.alpha_prime_seq[n] / closed - 1.0));
        }
        if (worst >= 1e-12) ok = false;
        d << "closed-form gap " << worst << "; ";
    }
    {
        const double track = rho_tracking(mc_config(Scheme::ozarow, 25), 100000, kSeed + 10);
        if (track >= 0.02) ok = false;
        d << "rho tracking " << track;
    }
    return {"coefficient_recursions", ok, d.str()};
}

inline CriterionResult criterion_first_stage_bound() {
    using namespace verify_detail;
    std::ostringstream d;
    bool ok = true;
    for (const Scheme s : {Scheme::twostep_dms, Scheme::hybrid_ncsit_dms}) {
        for (const int n : {40, 60}) {
            const SchemeConfig cfg = mc_config(s, n);
            const TrialBatch b = estimate_error_rate(cfg, 2000, kSeed + 11);
            const double bound = pe1_bound_dms(cfg.params, cfg.rho, n, cfg.rate1);
            const WilsonInterval w = wilson95(b.error_count_1, b.trials);
            const double half = 0.5 * (w.hi - w.lo);
            if (b.pe1() > bound + 3.0 * half) ok = false;
            d << scheme_name(s) << " n=" << n << " pe1 " << b.pe1() << " bound " << bound
              << "; ";
        }
    }
    return {"first_stage_bound", ok, d.str()};
}

inline std::vector<CriterionResult> run_acceptance(const std::string& only = "") {
    std::vector<CriterionResult> out;
    auto want = [&only](const std::string& name) {
        return only.empty() || name.find(only) != std::string::npos;
    };
    if (want("fixed_point")) out.push_back(criterion_fixed_point());
    if (want("sum_rate_identity")) out.push_back(criterion_sum_rate_identity());
    if (want("region_containment")) out.push_back(criterion_region_containment());
    if (want("sk_p2p_bound")) out.push_back(criterion_sk_p2p_bound());
    if (want("scheme_error_decay")) out.push_back(criterion_scheme_error_decay());
    if (want("secrecy_structure")) out.push_back(criterion_secrecy_structure());
    if (want("state_precancellation")) out.push_back(criterion_state_precancellation());
    if (want("coefficient_recursions")) out.push_back(criterion_coefficient_recursions());
    if (want("first_stage_bound")) out.push_back(criterion_first_stage_bound());
    return out;
}

}  // namespace gmacfb
