#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmacfb/capacity.hpp"
#include "gmacfb/model.hpp"
#include "gmacfb/schemes.hpp"

namespace gmacfb {

// Gaussian tail probability. erfc keeps full accuracy far into the tail.
inline double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Error bound of the single-user scheme: the terminal estimate is Gaussian
// with variance alpha_N shrinking geometrically in the block length.
inline double pe_bound_sk(double power, double sigma1_sq, int n, double rate) {
    if (power <= 0.0 || sigma1_sq <= 0.0)
        throw std::domain_error("power and sigma1_sq must be > 0");
    const double alpha_n = sigma1_sq / (12.0 * power) *
                           std::pow(sigma1_sq / (power + sigma1_sq), n - 1);
    return 2.0 * qfunc(0.5 * std::exp2(-static_cast<double>(n) * rate) /
                       std::sqrt(alpha_n));
}

// First-stage (common message) error bound of the split scheme.
inline double pe1_bound_dms(const ChannelParams& p, double rho, int n, double rate1) {
    if (rho < 0.0 || rho >= 1.0) throw std::domain_error("rho outside [0,1)");
    const double ps = dms_p_star(p, rho);
    const double rsq = dms_r_sq(p, rho);
    const double thr = std::log2(std::sqrt(rsq + ps) / std::sqrt(rsq));
    return 2.0 * qfunc(0.5 * std::sqrt(12.0 * ps / rsq) * std::exp2(-2.0 * thr) *
                       std::exp2(-static_cast<double>(n) * (rate1 - thr)));
}

// 95% Wilson score interval; well behaved at zero observed errors.
struct WilsonInterval {
    double lo = 0.0;
    double hi = 0.0;
};

inline WilsonInterval wilson95(std::int64_t successes, std::int64_t trials) {
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    const double z = 1.959963984540054;
    const double nn = static_cast<double>(trials);
    const double ph = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (ph + z2 / (2.0 * nn)) / denom;
    const double half =
        z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

enum class Scheme { sk_p2p, ozarow, rosenzweig_ncsit, twostep_dms, hybrid_ncsit_dms };

inline std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::sk_p2p: return "sk_p2p";
        case Scheme::ozarow: return "ozarow";
        case Scheme::rosenzweig_ncsit: return "rosenzweig_ncsit";
        case Scheme::twostep_dms: return "twostep_dms";
        case Scheme::hybrid_ncsit_dms: return "hybrid_ncsit_dms";
    }
    throw std::domain_error("unknown scheme");
}

inline Scheme scheme_from_name(const std::string& s) {
    if (s == "sk_p2p") return Scheme::sk_p2p;
    if (s == "ozarow") return Scheme::ozarow;
    if (s == "rosenzweig_ncsit") return Scheme::rosenzweig_ncsit;
    if (s == "twostep_dms") return Scheme::twostep_dms;
    if (s == "hybrid_ncsit_dms") return Scheme::hybrid_ncsit_dms;
    throw std::domain_error("unknown scheme '" + s + "'");
}

// The closed-form operating corner each scheme is driven at when rates are
// given as fractions. Two-user schemes use the fixed-point pair; the split
// schemes use their power-split corner.
inline RatePair analytic_corner(Scheme s, const ChannelParams& p, double rho) {
    switch (s) {
        case Scheme::sk_p2p:
            return {half_log2_1p(p.p1 / p.sigma1_sq), 0.0};
        case Scheme::ozarow:
        case Scheme::rosenzweig_ncsit: {
            const double rs = solve_rho_star(p);
            const double om = 1.0 - rs * rs;
            return {half_log2_1p(p.p1 * om / p.sigma1_sq),
                    half_log2_1p(p.p2 * om / p.sigma1_sq)};
        }
        case Scheme::twostep_dms:
        case Scheme::hybrid_ncsit_dms:
            return dms_corner(p, rho);
    }
    throw std::domain_error("unknown scheme");
}

struct SchemeConfig {
    Scheme scheme = Scheme::sk_p2p;
    ChannelParams params;
    double rho = 0.0;  // split parameter, used by the DMS schemes
    int n = 20;
    double rate1 = 0.0;
    double rate2 = 0.0;
    FaultInjection fault;
};

inline SessionResult run_session(const SchemeConfig& cfg, TrialSeed seed,
                                 bool force_zero_state = false) {
    switch (cfg.scheme) {
        case Scheme::sk_p2p:
            return run_sk_p2p(cfg.params.p1, cfg.params.sigma1_sq, cfg.n, cfg.rate1, seed);
        case Scheme::ozarow:
            return run_ozarow(cfg.params, cfg.n, cfg.rate1, cfg.rate2, seed, cfg.fault);
        case Scheme::rosenzweig_ncsit:
            return run_rosenzweig_ncsit(cfg.params, cfg.n, cfg.rate1, cfg.rate2, seed,
                                        cfg.fault, force_zero_state);
        case Scheme::twostep_dms:
            return run_twostep_dms(cfg.params, cfg.rho, cfg.n, cfg.rate1, cfg.rate2, seed,
                                   cfg.fault);
        case Scheme::hybrid_ncsit_dms:
            return run_hybrid_ncsit_dms(cfg.params, cfg.rho, cfg.n, cfg.rate1, cfg.rate2,
                                        seed, cfg.fault, force_zero_state);
    }
    throw std::domain_error("unknown scheme");
}

struct TrialBatch {
    SchemeConfig config;
    std::int64_t trials = 0;
    std::uint64_t master_seed = 0;
    std::int64_t error_count_1 = 0;
    std::int64_t error_count_2 = 0;
    std::int64_t error_count_joint = 0;
    std::vector<double> per_time_power_1;
    std::vector<double> per_time_power_2;
    std::map<std::string, double> diagnostics;

    double pe1() const { return static_cast<double>(error_count_1) / trials; }
    double pe2() const { return static_cast<double>(error_count_2) / trials; }
    double pe_joint() const { return static_cast<double>(error_count_joint) / trials; }
};

inline TrialBatch estimate_error_rate(const SchemeConfig& cfg, std::int64_t trials,
                                      std::uint64_t master_seed) {
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    TrialBatch b;
    b.config = cfg;
    b.trials = trials;
    b.master_seed = master_seed;
    b.per_time_power_1.assign(cfg.n, 0.0);
    b.per_time_power_2.assign(cfg.n, 0.0);
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        const SessionResult r = run_session(cfg, {master_seed, static_cast<std::uint64_t>(trial)});
        if (!r.correct1) ++b.error_count_1;
        if (!r.correct2) ++b.error_count_2;
        if (!r.correct1 || !r.correct2) ++b.error_count_joint;
        for (int i = 0; i < cfg.n; ++i) {
            b.per_time_power_1[i] += r.transcript.x1[i] * r.transcript.x1[i];
            b.per_time_power_2[i] += r.transcript.x2[i] * r.transcript.x2[i];
        }
    }
    for (int i = 0; i < cfg.n; ++i) {
        b.per_time_power_1[i] /= static_cast<double>(trials);
        b.per_time_power_2[i] /= static_cast<double>(trials);
    }
    return b;
}

namespace detail {

// Streaming Pearson correlation accumulator.
struct CorrAcc {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    std::int64_t n = 0;
    void add(double x, double y) {
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
        ++n;
    }
    double corr() const {
        const double nn = static_cast<double>(n);
        const double cov = sxy / nn - (sx / nn) * (sy / nn);
        const double vx = sxx / nn - (sx / nn) * (sx / nn);
        const double vy = syy / nn - (sy / nn) * (sy / nn);
        if (vx <= 0.0 || vy <= 0.0) return 0.0;
        return cov / std::sqrt(vx * vy);
    }
};

}  // namespace detail

// Max empirical correlation between either message point and any codeword
// symbol at time k >= 3. The schemes transmit pure noise functionals from
// time 3 on, so this should sit at sampling-noise level.
inline double independence_diagnostic(const SchemeConfig& cfg, std::int64_t trials,
                                      std::uint64_t master_seed) {
    if (trials < 100) throw std::domain_error("trials must be >= 100");
    const bool split =
        cfg.scheme == Scheme::twostep_dms || cfg.scheme == Scheme::hybrid_ncsit_dms;
    const int streams = split ? 3 : 2;  // x1,x2 or x1,u,v
    std::vector<detail::CorrAcc> acc(static_cast<std::size_t>(cfg.n) * streams * 2);
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        const SessionResult r =
            run_session(cfg, {master_seed, static_cast<std::uint64_t>(trial)});
        const Transcript& t = r.transcript;
        for (int i = 2; i < cfg.n; ++i) {
            for (int s = 0; s < streams; ++s) {
                const double x = split ? (s == 0 ? t.x1[i] : s == 1 ? t.u[i] : t.v[i])
                                       : (s == 0 ? t.x1[i] : t.x2[i]);
                acc[(static_cast<std::size_t>(i) * streams + s) * 2].add(x, t.theta1);
                acc[(static_cast<std::size_t>(i) * streams + s) * 2 + 1].add(x, t.theta2);
            }
        }
    }
    double mx = 0.0;
    for (const auto& a : acc)
        if (a.n > 0) mx = std::max(mx, std::abs(a.corr()));
    return mx;
}

// Runs each trial twice with identical noise, once with the drawn state and
// once with the state forced to zero, and reports the largest terminal
// estimate difference. Exact precancellation makes this vanish.
inline double state_invariance_check(const SchemeConfig& cfg, std::int64_t trials,
                                     std::uint64_t master_seed) {
    if (cfg.scheme != Scheme::rosenzweig_ncsit && cfg.scheme != Scheme::hybrid_ncsit_dms)
        throw std::domain_error("state_invariance_check needs a state-aware scheme");
    double mx = 0.0;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        const TrialSeed seed{master_seed, static_cast<std::uint64_t>(trial)};
        const SessionResult with_s = run_session(cfg, seed, false);
        const SessionResult no_s = run_session(cfg, seed, true);
        mx = std::max(mx, std::abs(with_s.final_eps1 - no_s.final_eps1));
        mx = std::max(mx, std::abs(with_s.final_eps2 - no_s.final_eps2));
    }
    return mx;
}

// Compares the empirical variance of every error process against its
// scheduled value for k <= min(n, 25). schedule_scale deliberately distorts
// the reference schedule (diagnostic use only).
inline double variance_validation(const SchemeConfig& cfg, std::int64_t trials,
                                  std::uint64_t master_seed, double schedule_scale = 1.0) {
    if (trials < 10000) throw std::domain_error("trials must be >= 10^4");
    const int kmax = std::min(cfg.n, 25);
    std::vector<double> ss1(kmax + 1, 0.0), ss2(kmax + 1, 0.0);
    std::vector<std::int64_t> n1(kmax + 1, 0), n2(kmax + 1, 0);
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        const SessionResult r =
            run_session(cfg, {master_seed, static_cast<std::uint64_t>(trial)});
        const Transcript& t = r.transcript;
        for (int k = 1; k <= kmax; ++k) {
            if (std::isfinite(t.eps1[k - 1])) {
                ss1[k] += t.eps1[k - 1] * t.eps1[k - 1];
                ++n1[k];
            }
            if (std::isfinite(t.eps2[k - 1])) {
                ss2[k] += t.eps2[k - 1] * t.eps2[k - 1];
                ++n2[k];
            }
        }
    }

    std::vector<double> sched1(kmax + 1, 0.0), sched2(kmax + 1, 0.0);
    switch (cfg.scheme) {
        case Scheme::sk_p2p: {
            double a = cfg.params.sigma1_sq / (12.0 * cfg.params.p1);
            for (int k = 1; k <= kmax; ++k) {
                sched1[k] = a;
                a *= cfg.params.sigma1_sq / (cfg.params.p1 + cfg.params.sigma1_sq);
            }
            break;
        }
        case Scheme::ozarow:
        case Scheme::rosenzweig_ncsit: {
            const SchemeCoefficients c = coeffs_ozarow(cfg.params, cfg.n);
            for (int k = 1; k <= kmax; ++k) {
                sched1[k] = c.alpha1_seq[k];
                if (k >= 2) sched2[k] = c.alpha2_seq[k];
            }
            break;
        }
        case Scheme::twostep_dms:
        case Scheme::hybrid_ncsit_dms: {
            const SchemeCoefficients c = coeffs_dms(cfg.params, cfg.rho, cfg.n);
            for (int k = 1; k <= kmax; ++k) {
                if (k >= 2) sched1[k] = c.alpha_prime_seq[k];
                if (c.private_enabled) sched2[k] = c.alpha_seq[k];
            }
            break;
        }
    }

    double mx = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        if (n1[k] > 0 && sched1[k] > 0.0) {
            const double emp = ss1[k] / static_cast<double>(n1[k]);
            mx = std::max(mx, std::abs(emp / (sched1[k] * schedule_scale) - 1.0));
        }
        if (n2[k] > 0 && sched2[k] > 0.0) {
            const double emp = ss2[k] / static_cast<double>(n2[k]);
            mx = std::max(mx, std::abs(emp / (sched2[k] * schedule_scale) - 1.0));
        }
    }
    return mx;
}

// Max deviation of the empirical error-process correlation from the
// scheduled rho_k (two-user scheme only), k <= min(n, 25).
inline double rho_tracking(const SchemeConfig& cfg, std::int64_t trials,
                           std::uint64_t master_seed) {
    if (cfg.scheme != Scheme::ozarow && cfg.scheme != Scheme::rosenzweig_ncsit)
        throw std::domain_error("rho_tracking needs the two-user scheme");
    const int kmax = std::min(cfg.n, 25);
    std::vector<detail::CorrAcc> acc(kmax + 1);
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        const SessionResult r =
            run_session(cfg, {master_seed, static_cast<std::uint64_t>(trial)});
        const Transcript& t = r.transcript;
        for (int k = 2; k <= kmax; ++k) acc[k].add(t.eps1[k - 1], t.eps2[k - 1]);
    }
    const SchemeCoefficients c = coeffs_ozarow(cfg.params, cfg.n);
    double mx = 0.0;
    for (int k = 2; k <= kmax; ++k)
        mx = std::max(mx, std::abs(acc[k].corr() - c.rho_seq[k]));
    return mx;
}

namespace detail {

inline void write_batch_row(std::ofstream& out, const TrialBatch& b) {
    const WilsonInterval w = wilson95(b.error_count_1, b.trials);
    auto diag = [&b](const std::string& key) {
        auto it = b.diagnostics.find(key);
        return it == b.diagnostics.end() ? 0.0 : it->second;
    };
    const ChannelParams& p = b.config.params;
    double leak = 0.0;
    if (p.sigma2_sq > 0.0) leak = leakage_bound(p, b.config.n);
    out << scheme_name(b.config.scheme) << ',' << p.p1 << ',' << p.p2 << ',' << p.q << ','
        << p.sigma1_sq << ',' << p.sigma2_sq << ',' << b.config.rho << ',' << b.config.n
        << ',' << b.config.rate1 << ',' << b.config.rate2 << ',' << b.trials << ','
        << b.pe1() << ',' << b.pe2() << ',' << b.pe_joint() << ',' << w.lo << ',' << w.hi
        << ',' << diag("max_corr") << ',' << diag("max_var_dev") << ',' << leak << '\n';
}

}  // namespace detail

// Batch-report CSV, one row per batch; callers supply extra diagnostics via
// each batch's diagnostics map (missing keys print as 0).
inline void write_batch_csv(const std::vector<TrialBatch>& batches, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "scheme,p1,p2,q,sigma1_sq,sigma2_sq,rho,n,r1,r2,trials,pe1,pe2,pe_joint,"
           "pe1_lo,pe1_hi,max_corr,max_var_dev,leakage_bound\n";
    out.precision(10);
    for (const TrialBatch& b : batches) detail::write_batch_row(out, b);
}

inline void write_batch_csv(const TrialBatch& b, const std::string& path) {
    write_batch_csv(std::vector<TrialBatch>{b}, path);
}

}  // namespace gmacfb
