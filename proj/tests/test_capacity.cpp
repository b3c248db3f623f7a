#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gmacfb/capacity.hpp"

using namespace gmacfb;

namespace {
const ChannelParams kUnit{1.0, 1.0, 1.0, 0.0, 0.0};
}

TEST_CASE("correlation fixed point solves its defining equation") {
    const double rs = solve_rho_star(kUnit);
    CHECK(rs > 0.30);
    CHECK(rs < 0.32);
    CHECK(std::abs(rho_star_residual(kUnit, rs)) < 1e-10);
    ChannelParams zero = kUnit;
    zero.p2 = 0.0;
    CHECK(solve_rho_star(zero) == 0.0);
}

TEST_CASE("split-corner rates sum to the coherent sum rate") {
    ChannelParams p{3.7, 0.9, 0.4, 0.0, 0.0};
    for (int j = 0; j <= 10; ++j) {
        const double rho = j / 10.0;
        const RatePair c = dms_corner(p, rho);
        const double sum = half_log2_1p(
            (p.p1 + p.p2 + 2.0 * std::sqrt(p.p1 * p.p2) * rho) / p.sigma1_sq);
        CHECK(c.r1 + c.r2 == Catch::Approx(sum).margin(1e-12));
    }
}

TEST_CASE("split corner at unit powers and half split") {
    const RatePair c = dms_corner(kUnit, 0.5);
    CHECK(c.r1 == Catch::Approx(0.59632).margin(5e-6));
    CHECK(c.r2 == Catch::Approx(0.40368).margin(5e-6));
}

TEST_CASE("pentagon membership respects all three constraints") {
    const RateRegion g = region_gmac(kUnit);
    const double c1 = half_log2_1p(1.0);   // 0.5 bit
    const double csum = half_log2_1p(2.0);
    CHECK(region_contains(g, {c1, csum - c1}, 1e-12));
    CHECK_FALSE(region_contains(g, {c1, csum - c1 + 1e-6}, 1e-9));
    CHECK_FALSE(region_contains(g, {c1 + 1e-6, 0.0}, 1e-9));
    CHECK(g.r2_at(c1) == Catch::Approx(csum - c1));
    CHECK(g.r2_at(c1 + 1.0) == -1.0);
}

TEST_CASE("feedback region contains the no-feedback pentagon") {
    for (ChannelParams p : {ChannelParams{1.0, 1.2, 0.1, 3.0, 0.0},
                            ChannelParams{10.0, 3.0, 10.0, 20.0, 5.0}}) {
        const RateRegion g = region_gmac(p);
        const RateRegion f = region_gmac_feedback(p, 101);
        for (const auto& pt : g.boundary) CHECK(region_contains(f, pt, 1e-9));
        // Feedback strictly enlarges the region: the coherent sum rate at the
        // fixed point exceeds the pentagon's.
        CHECK(f.max_r1() >= g.max_r1());
        bool outside = false;
        for (const auto& pt : f.boundary)
            if (!region_contains(g, pt, 1e-6)) outside = true;
        CHECK(outside);
    }
}

TEST_CASE("common-message region has no individual constraint on r1") {
    const RateRegion r = region_gmac_dms(kUnit, 51);
    const double sum_max = half_log2_1p(4.0);  // rho = 1
    CHECK(r.max_r1() == Catch::Approx(sum_max));
    CHECK(region_contains(r, {sum_max - 1e-9, 0.0}, 1e-12));
}

TEST_CASE("wiretap outer bound stays inside the pentagon and caps the sum rate") {
    ChannelParams p{1.0, 1.2, 0.1, 3.0, 0.0};
    const RateRegion wt = outer_gmac_wt(p, 21);
    const RateRegion g = region_gmac(p);
    for (const auto& pt : wt.boundary) CHECK(region_contains(g, pt, 1e-9));
    const double cap = half_log2_1p((p.p1 + p.p2) / p.sigma1_sq) -
                       half_log2_1p((p.p1 + p.p2) / (p.sigma1_sq + p.sigma2_sq));
    for (const auto& pt : wt.boundary) CHECK(pt.r1 + pt.r2 <= cap + 1e-9);
}

TEST_CASE("state-aware outer bound requires a state and stays inside the state-free region") {
    ChannelParams p{10.0, 3.0, 10.0, 20.0, 5.0};
    const RateRegion on = outer_ncsit_dms(p, 21);
    const RateRegion gd = region_gmac_dms(p, 101);
    for (const auto& pt : on.boundary) CHECK(region_contains(gd, pt, 1e-9));
    p.q = 0.0;
    CHECK_THROWS_AS(outer_ncsit_dms(p, 21), std::domain_error);
}

TEST_CASE("leakage bound scales as 1/n and needs a noisier tap") {
    ChannelParams p{1.0, 1.2, 0.1, 3.0, 0.0};
    const double l1 = leakage_bound(p, 1000);
    CHECK(l1 > 0.0);
    CHECK(l1 < 0.005);
    CHECK(leakage_bound(p, 2000) == Catch::Approx(0.5 * l1).epsilon(1e-12));
    p.sigma2_sq = 0.0;
    CHECK_THROWS_AS(leakage_bound(p, 1000), std::domain_error);
}

TEST_CASE("region CSV uses the documented header") {
    RateRegion r = region_gmac(kUnit);
    const std::string path = "test_region_out.csv";
    write_region_csv(r, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "r1,r2");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == r.boundary.size());
    in.close();
    std::remove(path.c_str());
}
