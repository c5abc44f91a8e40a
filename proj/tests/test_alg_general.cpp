#include "annsim/alg_general.hpp"
#include "annsim/harness.hpp"
#include "annsim/oracle.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace annsim;

TEST_CASE("params_general examples") {
    const auto gp = params_general(41, 4.0, 1 << 16, 2.0);
    CHECK(gp.s_real == doctest::Approx(4.875));
    CHECK(gp.s_int == 5);
    CHECK(gp.tau == 2);
    CHECK_FALSE(gp.overridden);
    CHECK_THROWS_AS(params_general(45, 3.0, 1 << 16, 2.0), InvalidRoundBudget);
    CHECK_NOTHROW(params_general(46, 3.0, 1 << 16, 2.0));
    CHECK_THROWS_AS(params_general(40, 4.0, 1 << 16, 2.0), InvalidRoundBudget);
}

TEST_CASE("params_general tau is minimal") {
    for (int k : {41, 50, 80, 120}) {
        for (std::size_t d : {1u << 10, 1u << 16, 1u << 30}) {
            const auto gp = params_general(k, 4.0, d, 2.0);
            const double e = (k - 1) / 2.0 - 2 * gp.s_real;
            const double target = std::ceil(scale_count(d, 2.0) / static_cast<double>(k));
            CHECK(std::pow(gp.tau / 2.0, e) >= target);
            if (gp.tau > 2) CHECK(std::pow((gp.tau - 1) / 2.0, e) < target);
        }
    }
}

TEST_CASE("params_override") {
    const auto gp = params_override(2, 4);
    CHECK(gp.s_real == 2.0);
    CHECK(gp.s_int == 2);
    CHECK(gp.tau == 4);
    CHECK(gp.overridden);
    CHECK_THROWS(params_override(0, 4));
    CHECK_THROWS(params_override(2, 1));
}

TEST_CASE("build_group_addresses examples") {
    const Point x(32);
    const SketchBank aux(PublicCoin(1), SketchRole::aux, 10, 32, 2.0, 40);
    const auto g7 = build_group_addresses(0, 35, 7, 3, x, aux);
    REQUIRE(g7.size() == 2);
    CHECK(g7[0].width() == 3);
    CHECK(g7[1].width() == 3);
    const auto g6 = build_group_addresses(0, 30, 6, 3, x, aux);
    REQUIRE(g6.size() == 2);
    CHECK(g6[0].width() == 3);
    CHECK(g6[1].width() == 2);
    const auto g5 = build_group_addresses(0, 20, 5, 4, x, aux);
    REQUIRE(g5.size() == 1);
    CHECK(g5[0].scales == std::vector<int>{4, 8, 12, 16});
    CHECK(g5[0].sketches[2] == aux.apply(12, x));
    CHECK(g5[0].group_lo == 4);
}

TEST_CASE("group scales are strictly increasing and cover the grid") {
    const Point x(16);
    const SketchBank aux(PublicCoin(2), SketchRole::aux, 8, 16, 2.0, 200);
    for (int tau = 2; tau < 12; ++tau) {
        for (int s = 1; s < 6; ++s) {
            for (int len = 1; len < 60; len += 7) {
                const auto groups = build_group_addresses(3, 3 + len, tau, s, x, aux);
                std::vector<int> all;
                for (const auto& g : groups) {
                    CHECK(g.width() >= 1);
                    CHECK(g.width() <= static_cast<std::size_t>(s));
                    all.insert(all.end(), g.scales.begin(), g.scales.end());
                }
                REQUIRE(all.size() == static_cast<std::size_t>(tau - 1));
                for (int r = 1; r < tau; ++r) CHECK(all[r - 1] == grid_point(3, 3 + len, tau, r));
            }
        }
    }
}

TEST_CASE("short windows go straight to the completion round") {
    gen::Rng rng(3);
    const auto db = gen::database(rng, 16, 64);
    const auto p = Params::make(16, 64, 4.0, 8, 30, 40);
    const auto gp = params_override(2, 4);  // 3 tau = 12 > I = 6
    const VirtualTables tables(db, p, PublicCoin(9), gp.aux_settings());
    for (int t = 0; t < 20; ++t) {
        const auto x = gen::point(rng, 64);
        ProbeSession a(tables, p.k);
        ProbeSession b(tables, p.k);
        std::optional<SearchResult> ra;
        std::optional<SearchResult> rb;
        try {
            ra = run_general(x, a, p, gp);
        } catch (const AssumptionViolated&) {
        }
        try {
            rb = detail::completion_round(b, x, 0, p.scales, {});
        } catch (const AssumptionViolated&) {
        }
        REQUIRE(ra.has_value() == rb.has_value());
        if (ra) CHECK(ra->answer == rb->answer);
        CHECK(a.close().to_string() == b.close().to_string());
    }
}

TEST_CASE("a dense first group member takes the one-round branch") {
    // Every point within distance 8 = 2^rho(1) of the query, none within 1.
    gen::Rng rng(4);
    const std::size_t d = 4096;
    const auto x = gen::point(rng, d);
    std::vector<Point> pts;
    for (std::size_t h = 2; h <= 8; ++h) {
        pts.push_back(gen::at_distance(rng, x, h));
        pts.push_back(gen::at_distance(rng, x, h));
    }
    const Database db(d, pts);
    const auto p = Params::make(db.size(), d, 4.0, 8, 60, 80);
    const auto gp = params_override(2, 4);
    REQUIRE(p.scales == 12);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const VirtualTables tables(db, p, PublicCoin(seed), gp.aux_settings());
        const auto sets = exact_sets(x, db, p, tables.main_bank(), &tables.aux_bank());
        const int rho1 = grid_point(0, 12, 4, 1);
        if (!exceeds_fraction(sets.D(12, rho1).size(), sets.C(12).size(), p.n, gp.s_real)) continue;
        ++checked;
        ProbeSession s(tables, p.k);
        const auto result = run_general(x, s, p, gp);
        REQUIRE(result.steps.size() == 1);
        CHECK(result.steps[0].branch == 1);
        CHECK(result.steps[0].rounds == 1);
        CHECK(result.steps[0].u_after == rho1 + 1);
        CHECK(s.close().rounds_used() == 2);
    }
    CHECK(checked > 5);
}

TEST_CASE("override mode answers correctly under both assumptions") {
    int held = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto inst = gen_database(64, 4096, {DatasetSpec::Kind::uniform, 0, 0}, seed);
        const auto p = Params::make(64, 4096, 4.0, 8, 60, 80);
        const auto gp = params_override(2, 4);
        const VirtualTables tables(inst.db, p, PublicCoin(seed + 100), gp.aux_settings());
        const auto sets = exact_sets(inst.query, inst.db, p, tables.main_bank(), &tables.aux_bank());
        if (!check_assumption1(sets) || !check_assumption2(sets, gp.s_real, p.n)) continue;
        ++held;
        ProbeSession s(tables, p.k);
        const auto result = run_general(inst.query, s, p, gp);
        CHECK(is_gamma_approx(inst.query, inst.db, result.answer.point, 4.0));
        for (const auto& step : result.steps) {
            CHECK(window_holds(sets, step.l_after, step.u_after));
            CHECK(phase_progress_holds(sets, step, gp.tau, gp.s_real, p.n));
        }
        CHECK(s.close().rounds_used() <= p.k);
    }
    CHECK(held > 6);
}

TEST_CASE("mismatched aux settings are rejected") {
    gen::Rng rng(5);
    const auto db = gen::database(rng, 8, 64);
    const auto p = Params::make(8, 64, 4.0, 8, 10, 10);
    const VirtualTables tables(db, p, PublicCoin(1), AuxSettings{3, 3.0});
    ProbeSession s(tables, p.k);
    CHECK_THROWS(run_general(db[0], s, p, params_override(2, 4)));
}

TEST_CASE("general_probe_bound") {
    CHECK(general_probe_bound(8, params_override(2, 4)) == doctest::Approx(3.5 * 4 + 12 + 2));
}
