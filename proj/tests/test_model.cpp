#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gmacfb/model.hpp"
#include "gmacfb/schemes.hpp"

using namespace gmacfb;

TEST_CASE("message grid centers partition the unit interval symmetrically") {
    CHECK(theta_of_message(1, 1) == 0.0);
    CHECK(theta_of_message(1, 4) == Catch::Approx(-0.375));
    CHECK(theta_of_message(4, 4) == Catch::Approx(0.375));
    for (std::int64_t w = 1; w <= 7; ++w)
        CHECK(theta_of_message(w, 7) == Catch::Approx(-theta_of_message(8 - w, 7)));
    CHECK_THROWS_AS(theta_of_message(0, 4), std::domain_error);
    CHECK_THROWS_AS(theta_of_message(5, 4), std::domain_error);
}

TEST_CASE("nearest_message inverts the grid and clamps out-of-range estimates") {
    for (std::int64_t card : {1, 2, 5, 1024}) {
        for (std::int64_t w = 1; w <= card; w += std::max<std::int64_t>(1, card / 7))
            CHECK(nearest_message(theta_of_message(w, card), card) == w);
    }
    CHECK(nearest_message(-3.0, 8) == 1);
    CHECK(nearest_message(3.0, 8) == 8);
    // Cell boundary between w=2 and w=3 of 4 cells sits at exactly 0 and
    // resolves to the smaller index.
    CHECK(nearest_message(0.0, 4) == 2);
    CHECK(nearest_message(1e-9, 4) == 3);
    CHECK_THROWS_AS(nearest_message(std::nan(""), 4), std::domain_error);
}

TEST_CASE("message_cardinality floors 2^(nR) and rejects unrepresentable grids") {
    CHECK(message_cardinality(10, 0.0) == 1);
    CHECK(message_cardinality(10, 0.5) == 32);
    CHECK(message_cardinality(20, 0.4) == 256);
    CHECK(message_cardinality(3, 0.5) == 2);  // floor(2^1.5) = 2
    CHECK_THROWS_AS(message_cardinality(100, 0.7), std::domain_error);
    CHECK_THROWS_AS(message_cardinality(10, -0.1), std::domain_error);
}

TEST_CASE("channel params validation rejects non-physical values") {
    ChannelParams p;
    CHECK_NOTHROW(p.validate());
    p.sigma1_sq = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ChannelParams{};
    p.q = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("eavesdropper output is the main output plus the tap noise, bit-exactly") {
    ChannelParams p{1.0, 1.2, 0.1, 3.0, 0.0};
    const SessionResult r = run_ozarow(p, 15, 0.3, 0.3, {42, 7});
    for (int i = 0; i < 15; ++i)
        CHECK(r.transcript.z[i] == r.transcript.y[i] + r.transcript.eta2[i]);
}

TEST_CASE("identical trial seeds reproduce transcripts bit for bit") {
    ChannelParams p{10.0, 3.0, 10.0, 20.0, 5.0};
    const SessionResult a = run_rosenzweig_ncsit(p, 12, 0.1, 0.05, {9, 3});
    const SessionResult b = run_rosenzweig_ncsit(p, 12, 0.1, 0.05, {9, 3});
    CHECK(identical_bits(a.transcript, b.transcript));
    const SessionResult c = run_rosenzweig_ncsit(p, 12, 0.1, 0.05, {9, 4});
    CHECK_FALSE(identical_bits(a.transcript, c.transcript));
}

TEST_CASE("bitwise transcript comparison treats NaN placeholders as equal") {
    Transcript a, b;
    a.n = b.n = 1;
    a.eps1 = {std::nan("")};
    b.eps1 = {std::nan("")};
    CHECK(identical_bits(a, b));
    b.eps1 = {0.0};
    CHECK_FALSE(identical_bits(a, b));
    // operator== would reject the NaN pair, which is why the bitwise
    // comparison exists.
    a.eps1 = {0.0};
    b.eps1 = {-0.0};
    CHECK_FALSE(identical_bits(a, b));
}
