#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gmacfb/analysis.hpp"
#include "gmacfb/capacity.hpp"
#include "gmacfb/schemes.hpp"

using namespace gmacfb;

namespace {
const ChannelParams kUnit{1.0, 1.0, 1.0, 0.0, 0.0};
const ChannelParams kState{10.0, 3.0, 10.0, 20.0, 5.0};
}

TEST_CASE("two-user error correlation converges to the fixed point") {
    const SchemeCoefficients c = coeffs_ozarow(kUnit, 500);
    const double rs = solve_rho_star(kUnit);
    CHECK(std::abs(std::abs(c.rho_seq[500]) - rs) < 1e-6);
    // Variances shrink monotonically once past the first update.
    for (int k = 4; k <= 500; ++k) {
        CHECK(c.alpha1_seq[k] < c.alpha1_seq[k - 1]);
        CHECK(c.alpha2_seq[k] < c.alpha2_seq[k - 1]);
    }
}

TEST_CASE("common-stream variance schedule matches its closed form") {
    for (double rho : {0.0, 0.3, 0.7, 0.95}) {
        const int n = 30;
        const SchemeCoefficients c = coeffs_dms(kState, rho, n);
        const double closed =
            std::pow(c.r_sq / (c.r_sq + c.p_star), n - 2) * c.r_sq / (12.0 * c.p_star);
        CHECK(c.alpha_prime_seq[n] == Catch::Approx(closed).epsilon(1e-12));
    }
}

TEST_CASE("full power split disables the private stream") {
    const SchemeCoefficients c = coeffs_dms(kUnit, 1.0, 10);
    CHECK_FALSE(c.private_enabled);
    CHECK_THROWS_AS(run_twostep_dms(kUnit, 1.0, 10, 0.3, 0.1, {1, 0}), std::domain_error);
    CHECK_THROWS_AS(run_hybrid_ncsit_dms(kState, 1.0, 10, 0.3, 0.0, {1, 0}),
                    std::domain_error);
}

TEST_CASE("single-user scheme decodes reliably below capacity") {
    int errors = 0;
    for (std::uint64_t t = 0; t < 200; ++t) {
        const SessionResult r = run_sk_p2p(1.0, 1.0, 20, 0.4, {11, t});
        if (!r.correct1) ++errors;
        // The terminal estimate carries exactly theta plus the error process.
        const Transcript& tr = r.transcript;
        CHECK(tr.theta_hat_1[19] == Catch::Approx(tr.theta1 + tr.eps1[19]).margin(1e-12));
    }
    CHECK(errors == 0);
}

TEST_CASE("terminal estimates equal message plus error process") {
    ChannelParams p{1.0, 1.5, 0.1, 1.2, 0.0};
    for (std::uint64_t t = 0; t < 50; ++t) {
        const SessionResult r = run_twostep_dms(p, 0.5, 25, 0.4, 0.3, {21, t});
        const Transcript& tr = r.transcript;
        CHECK(tr.theta_hat_1[24] ==
              Catch::Approx(tr.theta1 + tr.eps1[24]).margin(1e-12));
        if (r.correct1)
            CHECK(tr.theta_hat_2[24] ==
                  Catch::Approx(tr.theta2 + tr.eps2[24]).margin(1e-12));
    }
}

TEST_CASE("state precancellation leaves terminal errors unchanged") {
    for (double q : {1.0, 5.0}) {
        SchemeConfig cfg;
        cfg.scheme = Scheme::rosenzweig_ncsit;
        cfg.params = kState;
        cfg.params.q = q;
        cfg.n = 25;
        cfg.rate1 = 0.1;
        cfg.rate2 = 0.05;
        CHECK(state_invariance_check(cfg, 50, 31) < 1e-9);
        cfg.scheme = Scheme::hybrid_ncsit_dms;
        cfg.rho = 0.5;
        const RatePair corner = dms_corner(cfg.params, cfg.rho);
        cfg.rate1 = 0.5 * corner.r1;
        cfg.rate2 = 0.5 * corner.r2;
        CHECK(state_invariance_check(cfg, 50, 31) < 1e-9);
    }
}

TEST_CASE("disabling the precancellation offsets breaks state invariance") {
    SchemeConfig cfg;
    cfg.scheme = Scheme::rosenzweig_ncsit;
    cfg.params = kState;
    cfg.n = 25;
    cfg.rate1 = 0.1;
    cfg.rate2 = 0.05;
    cfg.fault.disable_state_precancel = true;
    CHECK(state_invariance_check(cfg, 50, 31) > 1e-3);
}

TEST_CASE("zero state variance reduces the state-aware schemes bit-exactly") {
    ChannelParams p = kState;
    p.q = 0.0;
    for (std::uint64_t t = 0; t < 20; ++t) {
        const TrialSeed seed{41, t};
        CHECK(identical_bits(run_rosenzweig_ncsit(p, 20, 0.2, 0.1, seed).transcript,
                             run_ozarow(p, 20, 0.2, 0.1, seed).transcript));
        CHECK(identical_bits(run_hybrid_ncsit_dms(p, 0.5, 20, 0.2, 0.1, seed).transcript,
                             run_twostep_dms(p, 0.5, 20, 0.2, 0.1, seed).transcript));
    }
}

TEST_CASE("codewords after time two decorrelate from the messages") {
    SchemeConfig cfg;
    cfg.scheme = Scheme::ozarow;
    cfg.params = {1.0, 1.0, 1.0, 0.0, 0.0};
    cfg.n = 10;
    cfg.rate1 = cfg.rate2 = 0.2;
    const double clean = independence_diagnostic(cfg, 2000, 51);
    CHECK(clean < 5.0 / std::sqrt(2000.0));
    // Leaking the message point into one codeword symbol must be caught.
    cfg.fault.theta_leak = 4.0;
    CHECK(independence_diagnostic(cfg, 2000, 51) > 0.1);
}

TEST_CASE("empirical error variances follow the schedule and expose distortions") {
    SchemeConfig cfg;
    cfg.scheme = Scheme::ozarow;
    cfg.params = {1.0, 1.0, 1.0, 0.0, 0.0};
    cfg.n = 10;
    cfg.rate1 = cfg.rate2 = 0.2;
    CHECK(variance_validation(cfg, 10000, 61) < 0.05);
    // Doubling the reference schedule must show up as a deviation near 1/2.
    const double distorted = variance_validation(cfg, 10000, 61, 2.0);
    CHECK(distorted > 0.4);
    CHECK(distorted < 0.6);
}
