#include <ostream>
#include <random>

#include "annsim/harness.hpp"
#include "annsim/oracle.hpp"
#include "annsim/randomness.hpp"
#include "annsim/sketch.hpp"

namespace annsim {

namespace {

bool metric_suite() {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 1 + rng() % 300;
        Point a(d), b(d), c(d);
        for (Point* p : {&a, &b, &c}) {
            for (auto& w : p->mutable_words()) w = rng();
            p->clear_padding();
        }
        if (hamming_dist(a, a) != 0 || hamming_dist(a, b) != hamming_dist(b, a)) return false;
        if (hamming_dist(a, c) > hamming_dist(a, b) + hamming_dist(b, c)) return false;
    }
    return true;
}

bool coin_suite() {
    const PublicCoin coin(42);
    const auto m1 = derive_matrix(coin, SketchRole::main, 3, 100, 130, 2.0);
    const auto m2 = derive_matrix(coin, SketchRole::main, 3, 100, 130, 2.0);
    const auto other = derive_matrix(coin, SketchRole::aux, 3, 100, 130, 2.0);
    for (std::size_t r = 0; r < 100; ++r) {
        if (m1.row(r) != m2.row(r)) return false;
    }
    bool differs = false;
    for (std::size_t r = 0; r < 100 && !differs; ++r) differs = m1.row(r) != other.row(r);
    return differs;
}

bool search_suite(Algo algo) {
    ExperimentConfig cfg;
    cfg.algo = algo;
    cfg.n = 32;
    cfg.d = 64;
    cfg.k = algo == Algo::general ? 8 : 2;
    cfg.c1 = 40;
    cfg.c2 = 60;
    cfg.trials = 10;
    cfg.threads = 1;
    cfg.dataset = {DatasetSpec::Kind::planted, 2, 12};
    if (algo == Algo::general) {
        cfg.override_s = 2;
        cfg.override_tau = 4;
    }
    const auto records = run_experiment(cfg);
    return summarize(cfg, records).violations == 0;
}

}  // namespace

bool selftest(std::ostream& out) {
    bool all = true;
    auto line = [&](const char* name, bool ok) {
        out << (ok ? "PASS " : "FAIL ") << name << '\n';
        all = all && ok;
    };
    line("hamming-metric", metric_suite());
    line("coin-determinism", coin_suite());
    line("simple-search", search_suite(Algo::simple));
    line("general-search", search_suite(Algo::general));
    line("near-search", search_suite(Algo::near));
    return all;
}

}  // namespace annsim
