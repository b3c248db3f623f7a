#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmacfb/model.hpp"

namespace gmacfb {

struct RatePair {
    double r1 = 0.0;
    double r2 = 0.0;
};

inline double log2p(double x) { return std::log2(x); }

// Half-log rate expression, clamped so degenerate parameter choices give 0
// rather than a tiny negative bound.
inline double half_log2_1p(double snr) {
    const double v = 0.5 * std::log2(1.0 + snr);
    return v > 0.0 ? v : 0.0;
}

// One member of a union-of-pentagons region: rates are achievable (or not
// excluded, for outer bounds) if r1 <= r1_max, r2 <= r2_max, r1+r2 <= sum_max.
// r1_max may be +inf when the region has no individual constraint on r1.
struct ConstraintSet {
    double r1_max = 0.0;
    double r2_max = 0.0;
    double sum_max = 0.0;
};

// A 2-D rate region given as a finite union of constraint sets (one per
// swept auxiliary parameter) plus a traced upper-right boundary.
struct RateRegion {
    std::string kind;
    ChannelParams params;
    std::vector<ConstraintSet> sets;
    std::vector<RatePair> boundary;

    double max_r1() const {
        double m = 0.0;
        for (const auto& c : sets) m = std::max(m, std::min(c.r1_max, c.sum_max));
        return m;
    }

    // Largest r2 available at this r1 across all members, or -1 if r1 is
    // outside every member.
    double r2_at(double r1) const {
        double best = -1.0;
        for (const auto& c : sets) {
            if (r1 > c.r1_max + 1e-12 || r1 > c.sum_max + 1e-12) continue;
            best = std::max(best, std::max(0.0, std::min(c.r2_max, c.sum_max - r1)));
        }
        return best;
    }

    void trace_boundary(int points = 201) {
        boundary.clear();
        const double hi = max_r1();
        for (int i = 0; i < points; ++i) {
            const double r1 = hi * static_cast<double>(i) / (points - 1);
            const double r2 = r2_at(r1);
            if (r2 < 0.0) continue;
            boundary.push_back({r1, r2});
        }
    }
};

inline bool region_contains(const RateRegion& region, RatePair p, double tol) {
    if (tol < 0.0) throw std::invalid_argument("tol must be >= 0");
    for (const auto& c : region.sets) {
        if (p.r1 <= c.r1_max + tol && p.r2 <= c.r2_max + tol &&
            p.r1 + p.r2 <= c.sum_max + tol)
            return true;
    }
    return false;
}

inline void write_region_csv(const RateRegion& region, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "r1,r2\n";
    out.precision(12);
    for (const auto& p : region.boundary) out << p.r1 << ',' << p.r2 << '\n';
}

// Residual of the correlation fixed-point equation
//   sigma1^2 (sigma1^2 + P1 + P2 + 2 sqrt(P1 P2) rho)
//     = (sigma1^2 + P1 (1 - rho^2)) (sigma1^2 + P2 (1 - rho^2)).
inline double rho_star_residual(const ChannelParams& p, double rho) {
    const double lhs =
        p.sigma1_sq * (p.sigma1_sq + p.p1 + p.p2 + 2.0 * std::sqrt(p.p1 * p.p2) * rho);
    const double rhs = (p.sigma1_sq + p.p1 * (1.0 - rho * rho)) *
                       (p.sigma1_sq + p.p2 * (1.0 - rho * rho));
    return lhs - rhs;
}

// Bisection on [0,1]. The residual is negative at 0 (value -P1*P2) and
// positive at 1, so a root always exists for positive powers.
inline double solve_rho_star(const ChannelParams& p) {
    p.validate();
    if (p.p1 == 0.0 || p.p2 == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    double flo = rho_star_residual(p, lo);
    double fhi = rho_star_residual(p, hi);
    if (flo > 0.0 || fhi < 0.0)
        throw std::runtime_error("no sign change on [0,1]: f(0)=" + std::to_string(flo) +
                                 " f(1)=" + std::to_string(fhi));
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = rho_star_residual(p, mid);
        if (fm <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline RateRegion region_gmac(const ChannelParams& p) {
    p.validate();
    RateRegion r;
    r.kind = "gmac";
    r.params = p;
    r.sets.push_back({half_log2_1p(p.p1 / p.sigma1_sq), half_log2_1p(p.p2 / p.sigma1_sq),
                      half_log2_1p((p.p1 + p.p2) / p.sigma1_sq)});
    r.trace_boundary();
    return r;
}

inline RateRegion region_gmac_feedback(const ChannelParams& p, int rho_grid_size = 201) {
    p.validate();
    if (rho_grid_size < 2) throw std::invalid_argument("rho_grid_size must be >= 2");
    RateRegion r;
    r.kind = "gmac_feedback";
    r.params = p;
    for (int i = 0; i < rho_grid_size; ++i) {
        const double rho = static_cast<double>(i) / (rho_grid_size - 1);
        const double om = 1.0 - rho * rho;
        r.sets.push_back(
            {half_log2_1p(p.p1 * om / p.sigma1_sq), half_log2_1p(p.p2 * om / p.sigma1_sq),
             half_log2_1p((p.p1 + p.p2 + 2.0 * std::sqrt(p.p1 * p.p2) * rho) / p.sigma1_sq)});
    }
    r.trace_boundary();
    return r;
}

inline RateRegion region_gmac_dms(const ChannelParams& p, int rho_grid_size = 201) {
    p.validate();
    if (rho_grid_size < 2) throw std::invalid_argument("rho_grid_size must be >= 2");
    RateRegion r;
    r.kind = "gmac_dms";
    r.params = p;
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rho_grid_size; ++i) {
        const double rho = static_cast<double>(i) / (rho_grid_size - 1);
        r.sets.push_back(
            {inf, half_log2_1p(p.p2 * (1.0 - rho * rho) / p.sigma1_sq),
             half_log2_1p((p.p1 + p.p2 + 2.0 * std::sqrt(p.p1 * p.p2) * rho) / p.sigma1_sq)});
    }
    r.trace_boundary();
    return r;
}

// Common-stream power and effective private-plus-noise variance of the
// two-step scheme at power split rho.
inline double dms_p_star(const ChannelParams& p, double rho) {
    return p.p1 + rho * rho * p.p2 + 2.0 * std::sqrt(p.p1 * p.p2) * rho;
}

inline double dms_r_sq(const ChannelParams& p, double rho) {
    return (1.0 - rho * rho) * p.p2 + p.sigma1_sq;
}

// The operating corner the two-step scheme is simulated at. The components
// sum to the coherent sum-rate bound exactly, since r^2 + P* equals
// sigma1^2 + P1 + P2 + 2 sqrt(P1 P2) rho.
inline RatePair dms_corner(const ChannelParams& p, double rho) {
    p.validate();
    if (rho < 0.0 || rho > 1.0) throw std::domain_error("rho outside [0,1]");
    const double ps = dms_p_star(p, rho);
    const double rsq = dms_r_sq(p, rho);
    return {half_log2_1p(ps / rsq), half_log2_1p((1.0 - rho * rho) * p.p2 / p.sigma1_sq)};
}

inline RateRegion outer_gmac_wt(const ChannelParams& p, int grid = 41) {
    p.validate();
    if (grid < 2) throw std::invalid_argument("grid must be >= 2");
    RateRegion r;
    r.kind = "outer_gmac_wt";
    r.params = p;
    const double s12 = p.sigma1_sq + p.sigma2_sq;
    const double sum_cap =
        std::max(0.0, half_log2_1p((p.p1 + p.p2) / p.sigma1_sq) -
                          half_log2_1p((p.p1 + p.p2) / s12));
    for (int i = 0; i < grid; ++i) {
        const double a1 = static_cast<double>(i) / (grid - 1);
        for (int j = 0; j < grid; ++j) {
            const double a2 = static_cast<double>(j) / (grid - 1);
            for (int k = 0; k < grid; ++k) {
                const double b = static_cast<double>(k) / (grid - 1);
                const double mx = std::max(a1 * p.p1, a2 * p.p2);
                const double common = s12 + mx + b * (p.p1 + p.p2 - mx);
                const double r1 = half_log2_1p(a1 * p.p1 / p.sigma1_sq) -
                                  0.5 * std::log2(common / (s12 + a2 * p.p2));
                const double r2 = half_log2_1p(a2 * p.p2 / p.sigma1_sq) -
                                  0.5 * std::log2(common / (s12 + a1 * p.p1));
                r.sets.push_back({std::max(0.0, r1), std::max(0.0, r2), sum_cap});
            }
        }
    }
    r.trace_boundary();
    return r;
}

inline RateRegion outer_gmac_dms(const ChannelParams& p, int grid = 201) {
    p.validate();
    if (grid < 2) throw std::invalid_argument("grid must be >= 2");
    RateRegion r;
    r.kind = "outer_gmac_dms";
    r.params = p;
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        const double rho = -1.0 + 2.0 * static_cast<double>(i) / (grid - 1);
        const double tot = p.p1 + p.p2 + 2.0 * std::sqrt(p.p1 * p.p2) * rho;
        const double sum = std::max(
            0.0, half_log2_1p(tot / p.sigma1_sq) -
                     half_log2_1p(tot / (p.sigma1_sq + p.sigma2_sq)));
        r.sets.push_back(
            {inf, half_log2_1p(p.p2 * (1.0 - rho * rho) / p.sigma1_sq), sum});
    }
    r.trace_boundary();
    return r;
}

// Outer bound for the state-known common/private-message model. The three
// correlations must form a valid correlation matrix of (X1, X2, S); triples
// failing the determinant test are skipped. a and b are the linear MMSE
// coefficients of X2 given (X1, S).
inline RateRegion outer_ncsit_dms(const ChannelParams& p, int grid = 41) {
    p.validate();
    if (p.q <= 0.0)
        throw std::domain_error("q must be > 0 (stateless models use outer_gmac_dms)");
    if (grid < 2) throw std::invalid_argument("grid must be >= 2");
    RateRegion r;
    r.kind = "outer_ncsit_dms";
    r.params = p;
    const double inf = std::numeric_limits<double>::infinity();
    const double s12 = p.sigma1_sq + p.sigma2_sq;
    for (int i = 0; i < grid; ++i) {
        const double r12 = -1.0 + 2.0 * static_cast<double>(i) / (grid - 1);
        for (int j = 0; j < grid; ++j) {
            const double r1s = -1.0 + 2.0 * static_cast<double>(j) / (grid - 1);
            if (std::abs(r1s) >= 1.0) continue;
            for (int k = 0; k < grid; ++k) {
                const double r2s = -1.0 + 2.0 * static_cast<double>(k) / (grid - 1);
                const double det = 1.0 - r12 * r12 - r1s * r1s - r2s * r2s +
                                   2.0 * r12 * r1s * r2s;
                if (det < -1e-12) continue;
                const double denom = 1.0 - r1s * r1s;
                const double a = std::sqrt(p.p2 / p.p1) * (r12 - r1s * r2s) / denom;
                const double b = std::sqrt(p.p2 / p.q) * (r2s - r12 * r1s) / denom;
                // Residual variance of X2 after subtracting its MMSE
                // estimate from (X1, S); never below sigma1^2 additive term.
                const double resid =
                    std::max(0.0, p.p2 + a * a * p.p1 + b * b * p.q -
                                      2.0 * a * r12 * std::sqrt(p.p1 * p.p2) -
                                      2.0 * b * r2s * std::sqrt(p.p2 * p.q) +
                                      2.0 * a * b * r1s * std::sqrt(p.p1 * p.q));
                const double r2_max =
                    std::max(0.0, 0.5 * std::log2((resid + p.sigma1_sq) / p.sigma1_sq));
                const double tot = p.p1 + p.p2 + p.q +
                                   2.0 * std::sqrt(p.p1 * p.p2) * r12 +
                                   2.0 * r1s * std::sqrt(p.p1 * p.q) +
                                   2.0 * r2s * std::sqrt(p.p2 * p.q);
                const double sum = std::max(
                    0.0, half_log2_1p(tot / p.sigma1_sq) - half_log2_1p(tot / s12));
                r.sets.push_back({inf, r2_max, sum});
            }
        }
    }
    r.trace_boundary();
    return r;
}

// Guaranteed gap between the total rate and the eavesdropper's equivocation
// rate for the error-feedback schemes: only the first two symbols carry the
// messages, so the leakage shrinks as 1/n.
inline double leakage_bound(const ChannelParams& p, int n) {
    p.validate();
    if (n < 1) throw std::domain_error("n must be >= 1");
    if (p.sigma2_sq <= 0.0) throw std::domain_error("sigma2_sq must be > 0");
    return (0.5 * std::log2(1.0 + p.p1 / p.sigma2_sq) +
            0.5 * std::log2(1.0 + p.p2 / p.sigma2_sq)) /
           static_cast<double>(n);
}

}  // namespace gmacfb
