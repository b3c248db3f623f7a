#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmacfb/rng.hpp"

namespace gmacfb {

// Physical scenario: transmit powers, main-channel noise variance, the
// wiretapper's excess noise variance and the state interference variance.
// The wiretap output is always the degraded Z = Y + eta2.
struct ChannelParams {
    double p1 = 1.0;
    double p2 = 1.0;
    double sigma1_sq = 1.0;
    double sigma2_sq = 0.0;
    double q = 0.0;

    void validate() const {
        if (!(sigma1_sq > 0.0)) throw std::invalid_argument("sigma1_sq must be > 0");
        if (!(p1 >= 0.0)) throw std::invalid_argument("p1 must be >= 0");
        if (!(p2 >= 0.0)) throw std::invalid_argument("p2 must be >= 0");
        if (!(sigma2_sq >= 0.0)) throw std::invalid_argument("sigma2_sq must be >= 0");
        if (!(q >= 0.0)) throw std::invalid_argument("q must be >= 0");
    }
};

// Center of the w-th of |W| equal sub-intervals of [-0.5, 0.5].
inline double theta_of_message(std::int64_t w, std::int64_t cardinality) {
    if (cardinality < 1) throw std::domain_error("cardinality must be >= 1");
    if (w < 1 || w > cardinality)
        throw std::domain_error("message index " + std::to_string(w) + " outside [1, " +
                                std::to_string(cardinality) + "]");
    return -0.5 + (2.0 * static_cast<double>(w) - 1.0) / (2.0 * static_cast<double>(cardinality));
}

// Minimum-distance decision on the message grid, clamped to [1, |W|].
// Exact midpoint ties resolve to the smaller index.
inline std::int64_t nearest_message(double theta_hat, std::int64_t cardinality) {
    if (cardinality < 1) throw std::domain_error("cardinality must be >= 1");
    if (!std::isfinite(theta_hat)) throw std::domain_error("theta_hat must be finite");
    // Grid centers sit at (w - 0.5)/|W| - 0.5; the boundary between w and
    // w+1 is at w/|W| - 0.5, which ceil() assigns to the lower cell.
    const double u = (theta_hat + 0.5) * static_cast<double>(cardinality);
    const double c = std::ceil(u);
    if (c < 1.0) return 1;
    if (c > static_cast<double>(cardinality)) return cardinality;
    return static_cast<std::int64_t>(c);
}

// |W| = floor(2^(N*R)), at least 1. Guarded so the grid stays representable.
inline std::int64_t message_cardinality(int n, double rate) {
    if (rate < 0.0) throw std::domain_error("rate must be >= 0");
    const double bits = static_cast<double>(n) * rate;
    if (bits > 60.0) throw std::domain_error("cardinality overflow: n*rate > 60 bits");
    const std::int64_t card = static_cast<std::int64_t>(std::floor(std::exp2(bits)));
    return card < 1 ? 1 : card;
}

// One channel use. The wiretapper sees the degraded z = y + noise2.
inline std::pair<double, double> channel_step(double x1, double x2, double s,
                                              double noise1, double noise2) {
    const double y = x1 + x2 + s + noise1;
    return {y, y + noise2};
}

// Full record of one trial: codewords, outputs, noises, state, and the
// receiver's estimate trajectories. Vectors are 0-indexed by time-1.
struct Transcript {
    int n = 0;
    double theta1 = 0.0, theta2 = 0.0;
    std::int64_t w1 = 1, w2 = 1;
    std::int64_t card1 = 1, card2 = 1;
    std::vector<double> x1, x2, u, v, x_star;
    std::vector<double> y, z, s, eta1, eta2;
    std::vector<double> theta_hat_1, theta_hat_2;
    // Encoder-side error processes (receiver estimate minus true theta with
    // any state offset removed); NaN where a process is not yet defined.
    std::vector<double> eps1, eps2;
    std::int64_t decoded_w1 = 1, decoded_w2 = 1;

    bool operator==(const Transcript&) const = default;
};

// Bit-level equality of two transcripts. Unlike operator==, NaN placeholders
// (undefined estimate slots) compare equal to themselves.
inline bool identical_bits(const Transcript& a, const Transcript& b) {
    auto veq = [](const std::vector<double>& x, const std::vector<double>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (std::bit_cast<std::uint64_t>(x[i]) != std::bit_cast<std::uint64_t>(y[i]))
                return false;
        return true;
    };
    return a.n == b.n && a.w1 == b.w1 && a.w2 == b.w2 && a.card1 == b.card1 &&
           a.card2 == b.card2 && a.decoded_w1 == b.decoded_w1 &&
           a.decoded_w2 == b.decoded_w2 && veq(a.x1, b.x1) && veq(a.x2, b.x2) &&
           veq(a.u, b.u) && veq(a.v, b.v) && veq(a.x_star, b.x_star) && veq(a.y, b.y) &&
           veq(a.z, b.z) && veq(a.s, b.s) && veq(a.eta1, b.eta1) && veq(a.eta2, b.eta2) &&
           veq(a.theta_hat_1, b.theta_hat_1) && veq(a.theta_hat_2, b.theta_hat_2) &&
           veq(a.eps1, b.eps1) && veq(a.eps2, b.eps2);
}

// Per-time dump of one trial, for debugging.
inline void write_transcript_csv(const Transcript& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,x1,u,v,y,z,s,eta1,eta2\n";
    out.precision(12);
    for (int i = 0; i < t.n; ++i)
        out << (i + 1) << ',' << t.x1[i] << ',' << t.u[i] << ',' << t.v[i] << ',' << t.y[i]
            << ',' << t.z[i] << ',' << t.s[i] << ',' << t.eta1[i] << ',' << t.eta2[i]
            << '\n';
}

}  // namespace gmacfb
