#include <cmath>

#include "annsim/randomness.hpp"
#include "annsim/sketch.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace annsim;

TEST_CASE("delta_threshold examples") {
    CHECK(delta_threshold(1, 2) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(delta_threshold(2, 2) == doctest::Approx(0.123046875).epsilon(1e-15));
    CHECK(delta_threshold(5, 1) == 0.0);
    CHECK_THROWS(delta_threshold(0.5, 2));
}

TEST_CASE("delta_threshold stays inside (0, 1/2)") {
    for (double beta = 1; beta < 3000; beta *= 1.37) {
        for (double alpha : {1.05, 1.3, 1.5, 1.9, 2.0}) {
            const double v = delta_threshold(beta, alpha);
            CHECK(v > 0.0);
            CHECK(v < 0.5);
        }
    }
}

TEST_CASE("row_collision_prob examples and monotonicity") {
    CHECK(row_collision_prob(3, 0) == 0.0);
    CHECK(row_collision_prob(1, 1) == doctest::Approx(0.25));
    for (double lambda : {1.0, 2.0, 4.0, 8.0, 100.0}) {
        double prev = -1.0;
        for (int h = 0; h < 400; ++h) {
            const double v = row_collision_prob(lambda, h);
            CHECK(v >= prev);
            CHECK(v <= 0.5);
            prev = v;
        }
    }
}

TEST_CASE("separation threshold lies between the near and far rates") {
    for (int i = 0; i <= 12; ++i) {
        const double beta = std::pow(2.0, i);
        const double t = separation_threshold(beta, 2.0);
        CHECK(t > row_collision_prob(beta, beta));
        CHECK(t < row_collision_prob(beta, 2 * beta));
    }
}

TEST_CASE("derive_matrix determinism and domain separation") {
    const PublicCoin coin(17);
    const auto a = derive_matrix(coin, SketchRole::main, 0, 70, 90, 2.0);
    const auto b = derive_matrix(coin, SketchRole::main, 0, 70, 90, 2.0);
    const auto c = derive_matrix(coin, SketchRole::aux, 0, 70, 90, 2.0);
    const auto e = derive_matrix(coin, SketchRole::main, 1, 70, 90, 2.0);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK_FALSE(a == e);
}

TEST_CASE("derive_matrix density") {
    const auto m = derive_matrix(PublicCoin(3), SketchRole::main, 0, 1000, 1000, 2.0);
    const double sigma = std::sqrt(0.25 * 0.75 / 1e6);
    CHECK(std::abs(m.density() - 0.25) <= 3 * sigma);

    const auto m3 = derive_matrix(PublicCoin(3), SketchRole::aux, 3, 500, 2000, 2.0);
    const double p3 = 1.0 / 32;
    CHECK(std::abs(m3.density() - p3) <= 3 * std::sqrt(p3 * (1 - p3) / 1e6));
}

TEST_CASE("sketch_apply examples") {
    gen::Rng rng(21);
    SketchMatrix id(16, 64, 0, SketchRole::main);
    for (std::size_t r = 0; r < 16; ++r) id.set(r, r, true);
    const auto p = gen::point(rng, 64);
    const auto out = sketch_apply(id, p);
    for (std::size_t r = 0; r < 16; ++r) CHECK(out.get(r) == p.get(r));
    CHECK(sketch_apply(id, Point(64)).popcount() == 0);
    CHECK_THROWS_AS(sketch_apply(id, Point(63)), DimensionMismatch);
}

TEST_CASE("sketch_apply matches per-row dot products") {
    gen::Rng rng(22);
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 1 + rng() % 150;
        const std::size_t rows = 1 + rng() % 140;
        const auto m = derive_matrix(PublicCoin(rng()), SketchRole::main, 0, rows, d, 2.0);
        const auto p = gen::point(rng, d);
        const auto out = sketch_apply(m, p);
        for (std::size_t r = 0; r < rows; ++r) {
            bool bit = false;
            for (std::size_t c = 0; c < d; ++c) bit ^= m.get(r, c) && p.get(c);
            CHECK(out.get(r) == bit);
        }
        CHECK(m.row(rows - 1).size() == d);
    }
}

TEST_CASE("row separation matches row_collision_prob by Monte Carlo") {
    // lambda = 2, h = 3: 10^5 independent rows.
    const std::size_t rows = 100000;
    const auto m = derive_matrix(PublicCoin(31), SketchRole::main, 1, rows, 3, 2.0);
    Point x(3);
    Point z = BitVector::from_bits("111");
    const auto diff = hamming_dist(sketch_apply(m, x), sketch_apply(m, z));
    const double p = row_collision_prob(2, 3);
    const double se = std::sqrt(p * (1 - p) / rows);
    CHECK(std::abs(static_cast<double>(diff) / rows - p) <= 3 * se);
}

TEST_CASE("threshold test separates near from far pairs") {
    // rows = 200, lambda = 4 (scale 2), d = 512; 1000 pairs at distance 4 and at 9.
    gen::Rng rng(41);
    const std::size_t rows = 200;
    const std::size_t d = 512;
    const auto radius = sketch_radius(ThresholdRule::midpoint, 2, 2.0, rows);
    int wrong = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto m = derive_matrix(PublicCoin(rng()), SketchRole::main, 2, rows, d, 2.0);
        const auto x = gen::point(rng, d);
        const auto near = gen::at_distance(rng, x, 4);
        const auto far = gen::at_distance(rng, x, 9);
        wrong += hamming_dist(m.apply(x), m.apply(near)) > radius;
        wrong += hamming_dist(m.apply(x), m.apply(far)) <= radius;
    }
    CHECK(wrong <= 0.05 * 2000);
}

TEST_CASE("row counts") {
    CHECK(main_rows(8, 256) == 64);
    CHECK(main_rows(1, 1) == 1);
    CHECK(aux_rows(8, 2, 256) == 32);
    CHECK(aux_rows(3, 2, 256) == 12);
}

TEST_CASE("SketchBank is lazy and matches derive_matrix") {
    const PublicCoin coin(8);
    const SketchBank bank(coin, SketchRole::aux, 40, 100, 2.0, 7);
    for (int i : {7, 0, 3}) CHECK(bank.matrix(i) == derive_matrix(coin, SketchRole::aux, i, 40, 100, 2.0));
    CHECK(&bank.matrix(3) == &bank.matrix(3));
    CHECK_THROWS(bank.matrix(8));
}
