#include <cmath>
#include <sstream>

#include "annsim/core.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace annsim;

TEST_CASE("hamming_dist examples") {
    CHECK(hamming_dist(BitVector::from_bits("0000"), BitVector::from_bits("0000")) == 0);
    CHECK(hamming_dist(BitVector::from_bits("1010"), BitVector::from_bits("0101")) == 4);
    CHECK_THROWS_AS(hamming_dist(BitVector(4), BitVector(5)), DimensionMismatch);
}

TEST_CASE("hamming_dist agrees with a per-bit loop") {
    gen::Rng rng(11);
    for (int t = 0; t < 500; ++t) {
        const std::size_t d = 1 + rng() % 200;
        const auto a = gen::point(rng, d);
        const auto b = gen::point(rng, d);
        CHECK(hamming_dist(a, b) == gen::naive_dist(a, b));
    }
}

TEST_CASE("hamming_dist is a metric") {
    gen::Rng rng(12);
    for (int t = 0; t < 500; ++t) {
        const std::size_t d = 1 + rng() % 130;
        const auto a = gen::point(rng, d);
        const auto b = gen::point(rng, d);
        const auto c = gen::point(rng, d);
        CHECK(hamming_dist(a, a) == 0);
        CHECK(hamming_dist(a, b) == hamming_dist(b, a));
        CHECK(hamming_dist(a, c) <= hamming_dist(a, b) + hamming_dist(b, c));
        CHECK((hamming_dist(a, b) == 0) == (a == b));
    }
}

TEST_CASE("bit vector text forms round-trip") {
    gen::Rng rng(13);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 1 + rng() % 150;
        const auto p = gen::point(rng, d);
        CHECK(BitVector::from_hex(p.to_hex(), d) == p);
        CHECK(BitVector::from_bits(p.to_bits()) == p);
        CHECK(p.padding_clear());
    }
    CHECK(BitVector::from_bits("0001").get(0));
    CHECK(BitVector::from_hex("8", 4).get(3));
    CHECK_THROWS(BitVector::from_hex("1f", 4));
    CHECK_THROWS(BitVector::from_hex("20", 5));
}

TEST_CASE("database validation") {
    const std::vector<Point> dup{BitVector::from_bits("01"), BitVector::from_bits("01")};
    CHECK_THROWS(Database(2, dup));
    CHECK_THROWS(Database(3, {BitVector::from_bits("01")}));
    CHECK_THROWS(Database(2, {}));
    const Database db(2, {BitVector::from_bits("01"), BitVector::from_bits("10")});
    CHECK(db.index_of(BitVector::from_bits("10")) == 1);
    CHECK(db.index_of(BitVector::from_bits("11")) == 2);
}

TEST_CASE("database text format round-trips") {
    gen::Rng rng(14);
    const auto db = gen::database(rng, 20, 70);
    std::stringstream ss;
    write_database(ss, db);
    const auto back = read_database(ss);
    REQUIRE(back.size() == db.size());
    CHECK(back.dim() == 70);
    for (std::size_t i = 0; i < db.size(); ++i) CHECK(back[i] == db[i]);
}

TEST_CASE("scale_count examples") {
    CHECK(scale_count(256, 2.0) == 8);
    CHECK(scale_count(1000, 2.0) == 10);
    CHECK(scale_count(100, 1.5) == 12);
    CHECK_THROWS(scale_count(1, 2.0));
}

TEST_CASE("scale_count is the least I with alpha^I >= d") {
    for (double alpha : {1.1, 1.5, 1.7320508075688772, 2.0}) {
        for (std::size_t d = 2; d < 3000; d += 7) {
            const int i = scale_count(d, alpha);
            // Independent check in long double with a tiny slack for exact powers.
            const long double a = alpha;
            CHECK(std::pow(a, i) * (1 + 1e-12L) >= static_cast<long double>(d));
            CHECK(std::pow(a, i - 1) < static_cast<long double>(d) * (1 - 1e-12L) + 1e-9L);
        }
    }
}

TEST_CASE("effective alpha") {
    CHECK(effective_alpha(4.0) == doctest::Approx(2.0));
    CHECK(effective_alpha(9.0) == doctest::Approx(2.0));
    CHECK(effective_alpha(2.25) == doctest::Approx(1.5));
    CHECK_THROWS(effective_alpha(1.0));
}

TEST_CASE("exceeds_fraction") {
    // n^(-1/s) with n = 16, s = 2 is exactly 1/4.
    CHECK_FALSE(exceeds_fraction(1, 4, 16, 2.0));
    CHECK(exceeds_fraction(2, 4, 16, 2.0));
    CHECK_FALSE(exceeds_fraction(0, 0, 16, 2.0));
    CHECK_FALSE(exceeds_fraction(0, 10, 16, 2.0));
    CHECK(exceeds_fraction(1, 1, 16, 2.0));
}

TEST_CASE("threshold rule names") {
    CHECK(parse_threshold_rule("midpoint") == ThresholdRule::midpoint);
    CHECK(parse_threshold_rule("closed-form") == ThresholdRule::closed_form);
    CHECK(to_string(ThresholdRule::closed_form) == "closed-form");
    CHECK_THROWS(parse_threshold_rule("other"));
}

TEST_CASE("Params::make") {
    const auto p = Params::make(256, 128, 4.0, 2);
    CHECK(p.alpha == doctest::Approx(2.0));
    CHECK(p.scales == 7);
    CHECK_THROWS(Params::make(0, 128, 4.0, 2));
    CHECK_THROWS(Params::make(10, 128, 4.0, 0));
}
