#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gmacfb/capacity.hpp"
#include "gmacfb/model.hpp"
#include "gmacfb/rng.hpp"

namespace gmacfb {

// Deterministic per-time schedules shared by encoders and decoder. All gains
// are computed in closed form from the variance recursions, never estimated
// from data. Sequences are 1-based; index 0 is unused.
struct SchemeCoefficients {
    int n = 0;
    double rho = 0.0;

    // Correlated two-user scheme (and its state-aware variant).
    std::vector<double> rho_seq;     // rho_k, k = 1..n
    std::vector<double> alpha1_seq;  // Var of user-1 error, k = 1..n
    std::vector<double> alpha2_seq;  // Var of user-2 error, k = 2..n

    // Common/private split scheme. alpha_seq is the private-stream error
    // variance (k = 1..n), alpha_prime_seq the common-stream one (k = 2..n).
    std::vector<double> alpha_seq;
    std::vector<double> alpha_prime_seq;
    double p_star = 0.0;
    double r_sq = 0.0;
    bool private_enabled = true;

    // Receiver/encoder update gains applied at time k. For the two-user
    // scheme beta1/beta2 are the per-user gains; for the split scheme beta1
    // is the common-stream gain (k >= 3) and beta2 the private one (k >= 2).
    std::vector<double> beta1_seq;
    std::vector<double> beta2_seq;

    // Weights of S_i (i = 3..n) in the time-1/2 precancellation offsets.
    std::vector<double> a1_coeffs;
    std::vector<double> a2_coeffs;
};

inline int sign_of(double x) { return x >= 0.0 ? 1 : -1; }

inline SchemeCoefficients coeffs_ozarow(const ChannelParams& p, int n) {
    p.validate();
    if (n < 3) throw std::domain_error("n must be >= 3");
    if (p.p1 <= 0.0 || p.p2 <= 0.0) throw std::domain_error("both powers must be > 0");
    SchemeCoefficients c;
    c.n = n;
    c.rho_seq.assign(n + 1, 0.0);
    c.alpha1_seq.assign(n + 1, 0.0);
    c.alpha2_seq.assign(n + 1, 0.0);
    c.beta1_seq.assign(n + 1, 0.0);
    c.beta2_seq.assign(n + 1, 0.0);
    c.a1_coeffs.assign(n + 1, 0.0);
    c.a2_coeffs.assign(n + 1, 0.0);

    const double ss = p.sigma1_sq;
    c.alpha1_seq[1] = c.alpha1_seq[2] = ss / (12.0 * p.p1);
    c.alpha2_seq[2] = ss / (12.0 * p.p2);
    c.rho_seq[1] = c.rho_seq[2] = 0.0;

    for (int k = 3; k <= n; ++k) {
        const double rho = c.rho_seq[k - 1];
        const double ar = std::abs(rho);
        const double om = 1.0 - rho * rho;
        const double d = p.p1 + p.p2 + 2.0 * std::sqrt(p.p1 * p.p2) * ar + ss;
        c.beta1_seq[k] =
            std::sqrt(c.alpha1_seq[k - 1]) * (std::sqrt(p.p1) + std::sqrt(p.p2) * ar) / d;
        c.beta2_seq[k] = sign_of(rho) * std::sqrt(c.alpha2_seq[k - 1]) *
                         (std::sqrt(p.p2) + std::sqrt(p.p1) * ar) / d;
        c.alpha1_seq[k] = c.alpha1_seq[k - 1] * (p.p2 * om + ss) / d;
        c.alpha2_seq[k] = c.alpha2_seq[k - 1] * (p.p1 * om + ss) / d;
        c.rho_seq[k] = (rho * ss - sign_of(rho) * std::sqrt(p.p1 * p.p2) * om) /
                       std::sqrt((p.p1 * om + ss) * (p.p2 * om + ss));
    }
    // The time-1/2 state offsets must absorb exactly the per-time gains the
    // receiver later applies to S_k.
    for (int k = 3; k <= n; ++k) {
        c.a1_coeffs[k] = c.beta1_seq[k];
        c.a2_coeffs[k] = c.beta2_seq[k];
    }
    return c;
}

inline SchemeCoefficients coeffs_dms(const ChannelParams& p, double rho, int n) {
    p.validate();
    if (n < 3) throw std::domain_error("n must be >= 3");
    if (rho < 0.0 || rho > 1.0) throw std::domain_error("rho outside [0,1]");
    if (p.p1 <= 0.0) throw std::domain_error("p1 must be > 0");
    SchemeCoefficients c;
    c.n = n;
    c.rho = rho;
    const double ss = p.sigma1_sq;
    const double pv = (1.0 - rho * rho) * p.p2;  // private-stream power
    c.p_star = dms_p_star(p, rho);
    c.r_sq = pv + ss;
    c.private_enabled = pv > 0.0;

    c.alpha_seq.assign(n + 1, 0.0);
    c.alpha_prime_seq.assign(n + 1, 0.0);
    c.beta1_seq.assign(n + 1, 0.0);
    c.beta2_seq.assign(n + 1, 0.0);
    c.a1_coeffs.assign(n + 1, 0.0);
    c.a2_coeffs.assign(n + 1, 0.0);

    if (c.private_enabled) {
        c.alpha_seq[1] = ss / (12.0 * pv);
        for (int k = 2; k <= n; ++k) {
            c.alpha_seq[k] = c.alpha_seq[k - 1] * ss / c.r_sq;
            c.beta2_seq[k] = std::sqrt(pv * c.alpha_seq[k - 1]) / c.r_sq;
        }
    }
    c.alpha_prime_seq[2] = c.r_sq / (12.0 * c.p_star);
    for (int k = 3; k <= n; ++k) {
        c.alpha_prime_seq[k] = c.alpha_prime_seq[k - 1] * c.r_sq / (c.p_star + c.r_sq);
        c.beta1_seq[k] =
            std::sqrt(c.p_star * c.alpha_prime_seq[k - 1]) / (c.p_star + c.r_sq);
    }

    // Offsets: A1 cancels the common-chain gains directly; A2 must also undo
    // the A1 remnants the private chain picks up through the subtracted
    // common-stream reconstruction.
    for (int j = 3; j <= n; ++j) c.a1_coeffs[j] = c.beta1_seq[j];
    double acc = c.beta2_seq.size() > 2 ? c.beta2_seq[2] * std::sqrt(12.0 * c.p_star) : 0.0;
    for (int j = 3; j <= n; ++j) {
        acc -= c.beta2_seq[j] * std::sqrt(c.p_star / c.alpha_prime_seq[j - 1]);
        c.a2_coeffs[j] = c.beta2_seq[j] + c.beta1_seq[j] * acc;
    }
    return c;
}

struct SessionResult {
    Transcript transcript;
    bool correct1 = false;
    bool correct2 = false;
    double final_eps1 = 0.0;
    double final_eps2 = 0.0;
};

// Deliberate breakage hooks for the diagnostic tests. All defaults leave the
// schemes untouched.
struct FaultInjection {
    double theta_leak = 0.0;           // adds theta_leak * theta1 to X_{1,3}
    bool disable_state_precancel = false;  // zeroes the A1/A2 offsets
};

namespace detail {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline void init_transcript(Transcript& t, int n) {
    t.n = n;
    t.x1.assign(n, 0.0);
    t.x2.assign(n, 0.0);
    t.u.assign(n, 0.0);
    t.v.assign(n, 0.0);
    t.x_star.assign(n, 0.0);
    t.y.assign(n, 0.0);
    t.z.assign(n, 0.0);
    t.s.assign(n, 0.0);
    t.eta1.assign(n, 0.0);
    t.eta2.assign(n, 0.0);
    t.theta_hat_1.assign(n, kNaN);
    t.theta_hat_2.assign(n, kNaN);
    t.eps1.assign(n, kNaN);
    t.eps2.assign(n, kNaN);
}

inline void draw_noise_and_state(Transcript& t, const ChannelParams& p, TrialSeed seed,
                                 bool force_zero_state) {
    for (int i = 0; i < t.n; ++i) {
        const std::uint64_t time = static_cast<std::uint64_t>(i + 1);
        t.eta1[i] = std::sqrt(p.sigma1_sq) *
                    rng::gaussian(seed.master_seed, seed.trial_index, time, rng::kStreamNoiseMain);
        t.eta2[i] = std::sqrt(p.sigma2_sq) *
                    rng::gaussian(seed.master_seed, seed.trial_index, time, rng::kStreamNoiseTap);
        // q = 0 stores exactly +0.0, not sqrt(0) * negative draw = -0.0, so
        // transcripts stay bit-identical to the stateless schemes.
        t.s[i] = (force_zero_state || p.q == 0.0)
                     ? 0.0
                     : std::sqrt(p.q) * rng::gaussian(seed.master_seed, seed.trial_index, time,
                                                      rng::kStreamState);
    }
}

inline void draw_messages(Transcript& t, TrialSeed seed, int n, double rate1, double rate2) {
    t.card1 = message_cardinality(n, rate1);
    t.card2 = message_cardinality(n, rate2);
    t.w1 = rng::uniform_index(seed.master_seed, seed.trial_index, 0, rng::kStreamMessage1,
                              t.card1);
    t.w2 = rng::uniform_index(seed.master_seed, seed.trial_index, 0, rng::kStreamMessage2,
                              t.card2);
    t.theta1 = theta_of_message(t.w1, t.card1);
    t.theta2 = theta_of_message(t.w2, t.card2);
}

// Correlated two-user engine. With force_zero_state (or q = 0) the state
// terms vanish exactly and this is the plain two-user error-feedback scheme.
inline SessionResult run_correlated_engine(const ChannelParams& p, int n, double rate1,
                                           double rate2, TrialSeed seed,
                                           const FaultInjection& fault,
                                           bool force_zero_state) {
    const SchemeCoefficients c = coeffs_ozarow(p, n);
    SessionResult res;
    Transcript& t = res.transcript;
    init_transcript(t, n);
    draw_noise_and_state(t, p, seed, force_zero_state);
    draw_messages(t, seed, n, rate1, rate2);

    double a1_off = 0.0, a2_off = 0.0;
    if (!fault.disable_state_precancel) {
        for (int i = 3; i <= n; ++i) {
            a1_off += c.a1_coeffs[i] * t.s[i - 1];
            a2_off += c.a2_coeffs[i] * t.s[i - 1];
        }
    }

    const double c1 = std::sqrt(12.0 * p.p1);
    const double c2 = std::sqrt(12.0 * p.p2);

    // Time 1: user 1 alone, state and offset folded into the codeword.
    t.x1[0] = c1 * (t.theta1 + a1_off) - t.s[0];
    auto [y1, z1] = channel_step(t.x1[0], 0.0, t.s[0], t.eta1[0], t.eta2[0]);
    t.y[0] = y1;
    t.z[0] = z1;
    double hat1 = t.y[0] / c1;
    double eps1 = hat1 - t.theta1 - a1_off;
    t.theta_hat_1[0] = hat1;
    t.eps1[0] = eps1;

    // Time 2: user 2 alone; user 1's estimate is carried over unchanged.
    t.x2[1] = c2 * (t.theta2 + a2_off) - t.s[1];
    auto [y2, z2] = channel_step(0.0, t.x2[1], t.s[1], t.eta1[1], t.eta2[1]);
    t.y[1] = y2;
    t.z[1] = z2;
    double hat2 = t.y[1] / c2;
    double eps2 = hat2 - t.theta2 - a2_off;
    t.theta_hat_1[1] = hat1;
    t.theta_hat_2[1] = hat2;
    t.eps1[1] = eps1;
    t.eps2[1] = eps2;

    for (int k = 3; k <= n; ++k) {
        const int i = k - 1;
        t.x1[i] = std::sqrt(p.p1 / c.alpha1_seq[k - 1]) * eps1;
        if (k == 3) t.x1[i] += fault.theta_leak * t.theta1;
        t.x2[i] =
            std::sqrt(p.p2 / c.alpha2_seq[k - 1]) * eps2 * sign_of(c.rho_seq[k - 1]);
        auto [y, z] = channel_step(t.x1[i], t.x2[i], t.s[i], t.eta1[i], t.eta2[i]);
        t.y[i] = y;
        t.z[i] = z;
        // Receiver updates use the raw output; encoders, knowing S, track
        // their error with the state removed.
        hat1 -= c.beta1_seq[k] * y;
        hat2 -= c.beta2_seq[k] * y;
        eps1 -= c.beta1_seq[k] * (y - t.s[i]);
        eps2 -= c.beta2_seq[k] * (y - t.s[i]);
        t.theta_hat_1[i] = hat1;
        t.theta_hat_2[i] = hat2;
        t.eps1[i] = eps1;
        t.eps2[i] = eps2;
    }

    t.decoded_w1 = nearest_message(hat1, t.card1);
    t.decoded_w2 = nearest_message(hat2, t.card2);
    res.correct1 = t.decoded_w1 == t.w1;
    res.correct2 = t.decoded_w2 == t.w2;
    res.final_eps1 = hat1 - t.theta1;
    res.final_eps2 = hat2 - t.theta2;
    return res;
}

// Common/private split engine with two-stage decoding. With force_zero_state
// (or q = 0) this is the stateless two-step scheme.
inline SessionResult run_split_engine(const ChannelParams& p, double rho, int n,
                                      double rate1, double rate2, TrialSeed seed,
                                      const FaultInjection& fault, bool force_zero_state) {
    const SchemeCoefficients c = coeffs_dms(p, rho, n);
    const bool state_active = !force_zero_state && p.q > 0.0;
    if (!c.private_enabled && rate2 > 0.0)
        throw std::domain_error("private stream disabled (rho = 1 or p2 = 0) but rate2 > 0");
    if (!c.private_enabled && state_active)
        throw std::domain_error("state precancellation needs an active private stream");

    SessionResult res;
    Transcript& t = res.transcript;
    init_transcript(t, n);
    draw_noise_and_state(t, p, seed, force_zero_state);
    draw_messages(t, seed, n, rate1, rate2);

    double a1_off = 0.0, a2_off = 0.0;
    if (!fault.disable_state_precancel) {
        for (int i = 3; i <= n; ++i) {
            a1_off += c.a1_coeffs[i] * t.s[i - 1];
            a2_off += c.a2_coeffs[i] * t.s[i - 1];
        }
    }

    const double pv = (1.0 - rho * rho) * p.p2;
    const double cv = std::sqrt(12.0 * pv);             // time-1 private scale
    const double cx = std::sqrt(12.0 * c.p_star);       // time-2 common scale
    const double split = 1.0 + rho * std::sqrt(p.p2 / p.p1);

    // Time 1: private stream alone (state folded in when active).
    if (c.private_enabled) t.v[0] = cv * (t.theta2 + a2_off) - t.s[0];
    t.x2[0] = t.u[0] + t.v[0];
    {
        auto [y, z] = channel_step(t.x1[0], t.x2[0], t.s[0], t.eta1[0], t.eta2[0]);
        t.y[0] = y;
        t.z[0] = z;
    }
    double eps2 = c.private_enabled ? t.y[0] / cv - t.theta2 - a2_off : 0.0;
    if (c.private_enabled) t.eps2[0] = eps2;

    // Time 2: common stream enters, split across the transmitters; the
    // private stream starts its error-feedback recursion.
    {
        const double xstar = cx * (t.theta1 + a1_off) - t.s[1];
        t.x1[1] = xstar / split;
        t.u[1] = xstar - t.x1[1];
        if (c.private_enabled) t.v[1] = std::sqrt(pv / c.alpha_seq[1]) * eps2;
        t.x_star[1] = xstar;
        t.x2[1] = t.u[1] + t.v[1];
        auto [y, z] = channel_step(t.x1[1], t.x2[1], t.s[1], t.eta1[1], t.eta2[1]);
        t.y[1] = y;
        t.z[1] = z;
    }
    double eps1 = t.y[1] / cx - t.theta1 - a1_off;
    double hat1 = t.y[1] / cx;
    t.theta_hat_1[1] = hat1;
    t.eps1[1] = eps1;
    if (c.private_enabled) {
        const double yp = t.y[1] - t.x1[1] - t.u[1] - t.s[1];
        eps2 -= c.beta2_seq[2] * yp;
        t.eps2[1] = eps2;
    }

    for (int k = 3; k <= n; ++k) {
        const int i = k - 1;
        const double xstar = std::sqrt(c.p_star / c.alpha_prime_seq[k - 1]) * eps1;
        t.x1[i] = xstar / split;
        if (k == 3) t.x1[i] += fault.theta_leak * t.theta1;
        t.u[i] = rho * std::sqrt(p.p2 / p.p1) * t.x1[i];
        if (c.private_enabled) t.v[i] = std::sqrt(pv / c.alpha_seq[k - 1]) * eps2;
        t.x_star[i] = t.x1[i] + t.u[i];
        t.x2[i] = t.u[i] + t.v[i];
        auto [y, z] = channel_step(t.x1[i], t.x2[i], t.s[i], t.eta1[i], t.eta2[i]);
        t.y[i] = y;
        t.z[i] = z;
        eps1 -= c.beta1_seq[k] * (y - t.s[i]);
        hat1 -= c.beta1_seq[k] * y;
        t.theta_hat_1[i] = hat1;
        t.eps1[i] = eps1;
        if (c.private_enabled) {
            const double yp = y - t.x1[i] - t.u[i] - t.s[i];
            eps2 -= c.beta2_seq[k] * yp;
            t.eps2[i] = eps2;
        }
    }

    // Stage 1: decode the common message from the raw-output chain.
    t.decoded_w1 = nearest_message(hat1, t.card1);
    res.correct1 = t.decoded_w1 == t.w1;
    res.final_eps1 = hat1 - t.theta1;
    const double theta1_dec = theta_of_message(t.decoded_w1, t.card1);

    // Stage 2: rebuild the common-stream contribution from the stage-1
    // estimate trajectory, subtract it, and run the private chain. A wrong
    // stage-1 decision propagates honestly.
    if (c.private_enabled) {
        double hat2 = t.y[0] / cv;
        t.theta_hat_2[0] = hat2;
        {
            const double yp = t.y[1] - cx * theta1_dec;
            hat2 -= c.beta2_seq[2] * yp;
            t.theta_hat_2[1] = hat2;
        }
        for (int k = 3; k <= n; ++k) {
            const int i = k - 1;
            const double recon = std::sqrt(c.p_star / c.alpha_prime_seq[k - 1]) *
                                 (t.theta_hat_1[i - 1] - theta1_dec);
            const double yp = t.y[i] - recon;
            hat2 -= c.beta2_seq[k] * yp;
            t.theta_hat_2[i] = hat2;
        }
        t.decoded_w2 = nearest_message(hat2, t.card2);
        res.correct2 = t.decoded_w2 == t.w2;
        res.final_eps2 = hat2 - t.theta2;
    } else {
        t.decoded_w2 = 1;
        res.correct2 = t.card2 == 1;
        res.final_eps2 = 0.0;
    }
    return res;
}

}  // namespace detail

// Classical single-user error-feedback scheme on the white Gaussian channel.
inline SessionResult run_sk_p2p(double power, double sigma1_sq, int n, double rate,
                                TrialSeed seed) {
    if (n < 1) throw std::domain_error("n must be >= 1");
    if (power <= 0.0 || sigma1_sq <= 0.0)
        throw std::domain_error("power and sigma1_sq must be > 0");
    SessionResult res;
    Transcript& t = res.transcript;
    detail::init_transcript(t, n);
    ChannelParams noise_only;
    noise_only.p1 = power;
    noise_only.p2 = 0.0;
    noise_only.sigma1_sq = sigma1_sq;
    detail::draw_noise_and_state(t, noise_only, seed, true);
    detail::draw_messages(t, seed, n, rate, 0.0);

    const double c1 = std::sqrt(12.0 * power);
    double alpha = sigma1_sq / (12.0 * power);
    t.x1[0] = c1 * t.theta1;
    t.y[0] = t.x1[0] + t.eta1[0];
    t.z[0] = t.y[0];
    double hat = t.y[0] / c1;
    t.theta_hat_1[0] = hat;
    t.eps1[0] = hat - t.theta1;
    for (int k = 2; k <= n; ++k) {
        const int i = k - 1;
        t.x1[i] = std::sqrt(power / alpha) * (hat - t.theta1);
        t.y[i] = t.x1[i] + t.eta1[i];
        t.z[i] = t.y[i];
        const double gain = std::sqrt(power * alpha) / (power + sigma1_sq);
        hat -= gain * t.y[i];
        alpha *= sigma1_sq / (power + sigma1_sq);
        t.theta_hat_1[i] = hat;
        t.eps1[i] = hat - t.theta1;
    }
    t.decoded_w1 = nearest_message(hat, t.card1);
    t.decoded_w2 = 1;
    res.correct1 = t.decoded_w1 == t.w1;
    res.correct2 = true;
    res.final_eps1 = hat - t.theta1;
    return res;
}

inline SessionResult run_ozarow(const ChannelParams& p, int n, double rate1, double rate2,
                                TrialSeed seed, const FaultInjection& fault = {}) {
    ChannelParams q0 = p;
    q0.q = 0.0;
    return detail::run_correlated_engine(q0, n, rate1, rate2, seed, fault, true);
}

inline SessionResult run_rosenzweig_ncsit(const ChannelParams& p, int n, double rate1,
                                          double rate2, TrialSeed seed,
                                          const FaultInjection& fault = {},
                                          bool force_zero_state = false) {
    return detail::run_correlated_engine(p, n, rate1, rate2, seed, fault, force_zero_state);
}

inline SessionResult run_twostep_dms(const ChannelParams& p, double rho, int n, double rate1,
                                     double rate2, TrialSeed seed,
                                     const FaultInjection& fault = {}) {
    ChannelParams q0 = p;
    q0.q = 0.0;
    return detail::run_split_engine(q0, rho, n, rate1, rate2, seed, fault, true);
}

inline SessionResult run_hybrid_ncsit_dms(const ChannelParams& p, double rho, int n,
                                          double rate1, double rate2, TrialSeed seed,
                                          const FaultInjection& fault = {},
                                          bool force_zero_state = false) {
    return detail::run_split_engine(p, rho, n, rate1, rate2, seed, fault, force_zero_state);
}

}  // namespace gmacfb
