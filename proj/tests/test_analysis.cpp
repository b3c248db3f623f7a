#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gmacfb/analysis.hpp"
#include "gmacfb/config.hpp"

using namespace gmacfb;

TEST_CASE("gaussian tail probability matches reference values") {
    CHECK(qfunc(0.0) == Catch::Approx(0.5));
    CHECK(qfunc(1.959963984540054) == Catch::Approx(0.025).margin(1e-9));
    CHECK(qfunc(-1.959963984540054) == Catch::Approx(0.975).margin(1e-9));
    CHECK(qfunc(6.0) == Catch::Approx(9.865876e-10).epsilon(1e-5));
}

TEST_CASE("single-user error bound shrinks geometrically with block length") {
    double prev = 1.0;
    for (int n = 5; n <= 30; n += 5) {
        const double b = pe_bound_sk(1.0, 1.0, n, 0.4);
        CHECK(b < prev);
        prev = b;
    }
    CHECK(pe_bound_sk(1.0, 1.0, 20, 0.4) < 1e-6);
    CHECK_THROWS_AS(pe_bound_sk(0.0, 1.0, 20, 0.4), std::domain_error);
}

TEST_CASE("wilson interval behaves sanely at the extremes") {
    const WilsonInterval zero = wilson95(0, 1000);
    CHECK(zero.lo >= 0.0);
    CHECK(zero.lo < 1e-12);
    CHECK(zero.hi > 0.0);
    CHECK(zero.hi < 0.01);
    const WilsonInterval all = wilson95(1000, 1000);
    CHECK(all.hi == 1.0);
    CHECK(all.lo > 0.99);
    const WilsonInterval half_small = wilson95(50, 100);
    const WilsonInterval half_large = wilson95(5000, 10000);
    CHECK(half_large.hi - half_large.lo < half_small.hi - half_small.lo);
    CHECK(half_small.lo < 0.5);
    CHECK(half_small.hi > 0.5);
    CHECK_THROWS_AS(wilson95(0, 0), std::domain_error);
}

TEST_CASE("scheme names round-trip") {
    for (Scheme s : {Scheme::sk_p2p, Scheme::ozarow, Scheme::rosenzweig_ncsit,
                     Scheme::twostep_dms, Scheme::hybrid_ncsit_dms})
        CHECK(scheme_from_name(scheme_name(s)) == s);
    CHECK_THROWS_AS(scheme_from_name("bogus"), std::domain_error);
}

TEST_CASE("analytic corners match their capacity expressions") {
    const ChannelParams p{1.0, 1.0, 1.0, 0.0, 0.0};
    const RatePair sk = analytic_corner(Scheme::sk_p2p, p, 0.0);
    CHECK(sk.r1 == Catch::Approx(0.5));
    CHECK(sk.r2 == 0.0);
    const RatePair oz = analytic_corner(Scheme::ozarow, p, 0.0);
    const double rs = solve_rho_star(p);
    CHECK(oz.r1 == Catch::Approx(half_log2_1p(1.0 - rs * rs)));
    CHECK(oz.r1 == oz.r2);
    const RatePair dm = analytic_corner(Scheme::twostep_dms, p, 0.5);
    const RatePair ref = dms_corner(p, 0.5);
    CHECK(dm.r1 == ref.r1);
    CHECK(dm.r2 == ref.r2);
}

TEST_CASE("monte carlo batches are reproducible and seed-sensitive") {
    SchemeConfig cfg;
    cfg.scheme = Scheme::ozarow;
    cfg.params = {1.0, 1.0, 1.0, 0.0, 0.0};
    cfg.n = 10;
    cfg.rate1 = cfg.rate2 = 0.3;
    const TrialBatch a = estimate_error_rate(cfg, 500, 7);
    const TrialBatch b = estimate_error_rate(cfg, 500, 7);
    CHECK(a.error_count_1 == b.error_count_1);
    CHECK(a.error_count_2 == b.error_count_2);
    CHECK(a.per_time_power_1 == b.per_time_power_1);
    CHECK_THROWS_AS(estimate_error_rate(cfg, 0, 7), std::domain_error);
}

TEST_CASE("average codeword powers respect the per-time budgets") {
    SchemeConfig cfg;
    cfg.scheme = Scheme::ozarow;
    cfg.params = {1.0, 1.0, 1.0, 0.0, 0.0};
    cfg.n = 15;
    cfg.rate1 = cfg.rate2 = 0.3;
    const TrialBatch b = estimate_error_rate(cfg, 20000, 13);
    // From time 3 on both users transmit at exactly their power budget.
    for (int i = 2; i < cfg.n; ++i) {
        CHECK(b.per_time_power_1[i] == Catch::Approx(1.0).epsilon(0.05));
        CHECK(b.per_time_power_2[i] == Catch::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("batch report CSV uses the documented header and one row per batch") {
    SchemeConfig cfg;
    cfg.scheme = Scheme::sk_p2p;
    cfg.params = {1.0, 0.0, 1.0, 0.0, 0.0};
    cfg.n = 10;
    cfg.rate1 = 0.3;
    const TrialBatch b = estimate_error_rate(cfg, 100, 3);
    const std::string path = "test_batch_out.csv";
    write_batch_csv(b, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "scheme,p1,p2,q,sigma1_sq,sigma2_sq,rho,n,r1,r2,trials,pe1,pe2,pe_joint,"
          "pe1_lo,pe1_hi,max_corr,max_var_dev,leakage_bound");
    std::string row;
    CHECK(std::getline(in, row).good());
    CHECK(row.rfind("sk_p2p,", 0) == 0);
    CHECK_FALSE(std::getline(in, row).good());
    in.close();
    std::remove(path.c_str());
}

TEST_CASE("config files parse key-value lines with comments") {
    const std::string path = "test_config_in.cfg";
    {
        std::ofstream out(path);
        out << "# campaign settings\n"
               "command = simulate\n"
               "preset = fig8   # baseline first\n"
               "p2 = 2.5\n"
               "\n"
               "trials = 500\n";
    }
    RunConfig cfg;
    load_config_file(cfg, path);
    CHECK(cfg.command == "simulate");
    CHECK(cfg.params.p1 == 1.0);       // from the preset
    CHECK(cfg.params.p2 == 2.5);       // explicit key overrides it
    CHECK(cfg.params.sigma2_sq == 3.0);
    CHECK(cfg.trials == 500);
    std::remove(path.c_str());

    RunConfig bad;
    CHECK_THROWS_AS(apply_key(bad, "nonsense", "1"), std::domain_error);
    CHECK_THROWS_AS(apply_key(bad, "p1", "abc"), std::domain_error);
    CHECK_THROWS_AS(apply_key(bad, "preset", "fig99"), std::domain_error);
}
