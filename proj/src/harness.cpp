#include "annsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "annsim/alg_simple.hpp"
#include "annsim/near_search.hpp"
#include "annsim/oracle.hpp"
#include "annsim/probe_engine.hpp"
#include "annsim/randomness.hpp"
#include "annsim/tables.hpp"

namespace annsim {

namespace {

constexpr std::uint64_t kDataTag = 0x64617461;  // "data"

/// Unbiased integer in [0, bound) by rejection; std distributions are not
/// portable across standard libraries.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

Point uniform_point(std::mt19937_64& rng, std::size_t d) {
    Point p(d);
    for (auto& w : p.mutable_words()) w = rng();
    p.clear_padding();
    return p;
}

/// Copy of `base` with `h` distinct coordinates flipped.
Point flip_random(std::mt19937_64& rng, const Point& base, std::size_t h, std::vector<std::size_t>& scratch) {
    const std::size_t d = base.size();
    scratch.resize(d);
    std::iota(scratch.begin(), scratch.end(), std::size_t{0});
    Point p = base;
    for (std::size_t t = 0; t < h; ++t) {
        const std::size_t pick = t + static_cast<std::size_t>(below(rng, d - t));
        std::swap(scratch[t], scratch[pick]);
        p.flip(scratch[t]);
    }
    return p;
}

bool fits_in_space(std::size_t n, std::size_t d) { return d >= 63 || n <= (std::size_t{1} << d); }

std::uint64_t data_seed(std::uint64_t master, std::size_t trial) {
    return mix_key(mix_key(master, kDataTag), static_cast<std::uint64_t>(trial));
}

double fraction_s(const ExperimentConfig& cfg) {
    if (cfg.algo == Algo::general) return cfg.general_params().s_real;
    return static_cast<double>(cfg.override_s.value_or(2));
}

}  // namespace

std::string_view to_string(Algo algo) {
    switch (algo) {
        case Algo::simple:
            return "simple";
        case Algo::general:
            return "general";
        case Algo::near:
            return "near";
    }
    return "?";
}

Algo parse_algo(std::string_view name) {
    if (name == "simple") return Algo::simple;
    if (name == "general") return Algo::general;
    if (name == "near") return Algo::near;
    throw ConfigError("unknown algorithm: " + std::string(name));
}

Instance gen_database(std::size_t n, std::size_t d, const DatasetSpec& spec, std::uint64_t seed) {
    if (n < 1 || d < 1) throw ConfigError("dataset needs n >= 1 and d >= 1");
    if (!fits_in_space(n, d)) throw ConfigError("cannot draw " + std::to_string(n) + " distinct points in dimension " +
                                                std::to_string(d));
    std::mt19937_64 rng(seed);
    std::vector<Point> points;
    points.reserve(n);
    std::unordered_set<Point, BitVectorHash> seen;

    if (spec.kind == DatasetSpec::Kind::uniform) {
        Point query = uniform_point(rng, d);
        if (d < 20 && 2 * n > (std::size_t{1} << d)) {
            // Dense request: shuffle the whole cube and keep a prefix.
            std::vector<std::uint64_t> all(std::size_t{1} << d);
            std::iota(all.begin(), all.end(), std::uint64_t{0});
            for (std::size_t t = 0; t < n; ++t) {
                std::swap(all[t], all[t + static_cast<std::size_t>(below(rng, all.size() - t))]);
                points.push_back(Point::from_words(std::span<const std::uint64_t>(&all[t], 1), d));
            }
        } else {
            while (points.size() < n) {
                Point p = uniform_point(rng, d);
                if (seen.insert(p).second) points.push_back(std::move(p));
            }
        }
        return Instance{Database(d, std::move(points)), std::move(query)};
    }

    if (spec.plant_dist > d) throw ConfigError("planted distance exceeds the dimension");
    if (spec.plant_gap >= d) throw ConfigError("planted gap must be smaller than the dimension");
    if (spec.plant_gap < spec.plant_dist) throw ConfigError("planted gap must not be below the planted distance");
    Point query = uniform_point(rng, d);
    std::vector<std::size_t> scratch;
    points.push_back(flip_random(rng, query, spec.plant_dist, scratch));
    seen.insert(points.back());
    std::size_t attempts = 0;
    const std::size_t far_span = d - spec.plant_gap;
    while (points.size() < n) {
        if (++attempts > 64 * n + 1024) throw ConfigError("planted dataset: too few distinct far points available");
        const std::size_t h = spec.plant_gap + 1 + static_cast<std::size_t>(below(rng, far_span));
        Point p = flip_random(rng, query, h, scratch);
        if (seen.insert(p).second) points.push_back(std::move(p));
    }
    return Instance{Database(d, std::move(points)), std::move(query)};
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (repeat < 1) throw ConfigError("repeat must be at least 1");
    if (n < 1) throw ConfigError("n must be at least 1");
    if (d < 2) throw ConfigError("d must be at least 2");
    if (!fits_in_space(n, d)) throw ConfigError("n exceeds 2^d");
    if (!(gamma > 1.0)) throw ConfigError("gamma must exceed 1");
    if (k < 1) throw ConfigError("k must be at least 1");
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw ConfigError("c1 and c2 must be positive");
    if (!(c > 2.0)) throw ConfigError("c must exceed 2");
    if (override_s.has_value() != override_tau.has_value()) {
        throw ConfigError("--override-s and --override-tau go together");
    }
    if (dataset.kind == DatasetSpec::Kind::planted) {
        if (dataset.plant_dist > d || dataset.plant_gap >= d) throw ConfigError("planted distances exceed d");
        if (!(static_cast<double>(dataset.plant_gap) > gamma * static_cast<double>(dataset.plant_dist))) {
            throw ConfigError("planted gap must exceed gamma * planted distance");
        }
    }
    if (algo == Algo::near && !lambda && dataset.kind != DatasetSpec::Kind::planted) {
        throw ConfigError("near search needs --lambda (or a planted dataset)");
    }
    if (algo == Algo::general) {
        try {
            (void)general_params();
        } catch (const InvalidRoundBudget& e) {
            throw ConfigError(e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
}

Params ExperimentConfig::params() const {
    Params p = Params::make(n, d, gamma, k, c1, c2, c, seed);
    p.threshold = threshold;
    return p;
}

GeneralParams ExperimentConfig::general_params() const {
    if (override_s && override_tau) return params_override(*override_s, *override_tau);
    return params_general(k, c, d, effective_alpha(gamma));
}

double ExperimentConfig::near_lambda() const {
    if (lambda) return *lambda;
    return static_cast<double>(std::max<std::size_t>(1, dataset.plant_dist));
}

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.trial << ',' << r.seed << ',' << to_string(r.algo) << ',' << (r.success ? 1 : 0) << ','
            << r.probes_total << ',' << r.rounds_used << ',' << (r.assumption1 ? 1 : 0) << ','
            << (r.assumption2 ? 1 : 0) << ',' << r.exact_dist << ',' << r.returned_dist << '\n';
    }
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t trial) {
    const Instance inst = gen_database(cfg.n, cfg.d, cfg.dataset, data_seed(cfg.seed, trial));
    const Params params = cfg.params();
    const std::optional<GeneralParams> gp =
        cfg.algo == Algo::general ? std::optional(cfg.general_params()) : std::nullopt;
    const auto nn = exact_nn(inst.query, inst.db);

    TrialRecord rec;
    rec.trial = trial;
    rec.algo = cfg.algo;
    rec.seed = coin_for_trial(cfg.seed, trial, 0).seed();
    rec.exact_dist = nn.dist;

    std::optional<DataPoint> best;
    bool near_said_no = false;
    for (int rep = 0; rep < cfg.repeat; ++rep) {
        const PublicCoin coin = coin_for_trial(cfg.seed, trial, static_cast<std::uint64_t>(rep));
        const VirtualTables tables(inst.db, params, coin,
                                   gp ? std::optional(gp->aux_settings()) : std::nullopt);
        ProbeSession session(tables, cfg.k);

        std::optional<DataPoint> candidate;
        std::optional<SearchResult> search;
        try {
            switch (cfg.algo) {
                case Algo::simple:
                    search = run_simple(inst.query, session, params);
                    break;
                case Algo::general:
                    search = run_general(inst.query, session, params, *gp);
                    break;
                case Algo::near: {
                    const auto answer = run_near(inst.query, cfg.near_lambda(), session, params);
                    candidate = answer.point;
                    if (answer.is_no()) near_said_no = true;
                    break;
                }
            }
            if (search) candidate = search->answer;
        } catch (const AssumptionViolated& e) {
            rec.assumption_violated = true;
            rec.note = e.what();
        } catch (const RoundBudgetExceeded& e) {
            rec.within_bounds = false;
            rec.note = e.what();
        }
        const auto transcript = session.close();
        rec.probes_total += transcript.probes_total();
        rec.rounds_used = std::max(rec.rounds_used, transcript.rounds_used());

        switch (cfg.algo) {
            case Algo::simple:
                if (transcript.probes_total() > simple_probe_bound(cfg.k, tau_simple(cfg.k, cfg.d, params.alpha)) ||
                    transcript.rounds_used() > cfg.k) {
                    rec.within_bounds = false;
                }
                break;
            case Algo::general:
                if (transcript.rounds_used() > cfg.k ||
                    (!gp->overridden &&
                     static_cast<double>(transcript.probes_total()) > general_probe_bound(cfg.k, *gp))) {
                    rec.within_bounds = false;
                }
                break;
            case Algo::near:
                if (transcript.probes_total() != 1 || transcript.rounds_used() != 1) rec.within_bounds = false;
                break;
        }

        if (rep == 0) {
            const ScaleSets sets =
                exact_sets(inst.query, inst.db, params, tables.main_bank(), gp ? &tables.aux_bank() : nullptr);
            rec.assumption1 = check_assumption1(sets);
            rec.assumption2 = gp ? check_assumption2(sets, gp->s_real, params.n) : false;
            const bool assumptions = rec.assumption1 && (!gp || rec.assumption2);
            if (assumptions && search && !search->degenerate) {
                // C_0 can only be non-empty through points within distance
                // alpha, which the membership probes do not all catch.
                const bool b1_empty = sets.B(1).empty();
                int l = 0;
                int u = params.scales;
                auto window_ok = [&](int lo, int hi) {
                    return !sets.C(hi).empty() && (sets.C(lo).empty() || (lo == 0 && !b1_empty));
                };
                if (!window_ok(l, u)) rec.invariants_hold = false;
                for (const auto& step : search->steps) {
                    if (!window_ok(step.l_after, step.u_after)) rec.invariants_hold = false;
                    if (gp && !phase_progress_holds(sets, step, gp->tau, gp->s_real, params.n)) {
                        rec.invariants_hold = false;
                    }
                }
            }
        }

        if (candidate && (!best || hamming_dist(inst.query, candidate->point) <
                                       hamming_dist(inst.query, best->point))) {
            best = candidate;
        }
    }

    if (best) rec.returned_dist = static_cast<long long>(hamming_dist(inst.query, best->point));
    if (cfg.algo == Algo::near) {
        // Contract: a point within gamma*lambda when some point lies within
        // lambda; NO when nothing lies within gamma*lambda.
        const double lambda = cfg.near_lambda();
        const double far = cfg.gamma * lambda;
        if (static_cast<double>(nn.dist) <= lambda) {
            rec.success = best && static_cast<double>(rec.returned_dist) <= far;
        } else if (static_cast<double>(nn.dist) > far) {
            rec.success = !best && near_said_no;
        } else {
            rec.success = true;
        }
    } else {
        rec.success = best && is_gamma_approx(inst.query, inst.db, best->point, cfg.gamma);
    }
    return rec;
}

std::string trial_transcript(const ExperimentConfig& cfg, std::size_t trial) {
    const Instance inst = gen_database(cfg.n, cfg.d, cfg.dataset, data_seed(cfg.seed, trial));
    const Params params = cfg.params();
    const std::optional<GeneralParams> gp =
        cfg.algo == Algo::general ? std::optional(cfg.general_params()) : std::nullopt;
    const VirtualTables tables(inst.db, params, coin_for_trial(cfg.seed, trial, 0),
                               gp ? std::optional(gp->aux_settings()) : std::nullopt);
    ProbeSession session(tables, cfg.k);
    try {
        switch (cfg.algo) {
            case Algo::simple:
                (void)run_simple(inst.query, session, params);
                break;
            case Algo::general:
                (void)run_general(inst.query, session, params, *gp);
                break;
            case Algo::near:
                (void)run_near(inst.query, cfg.near_lambda(), session, params);
                break;
        }
    } catch (const AssumptionViolated&) {
    }
    return session.close().to_string();
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<TrialRecord> records(cfg.trials);
    unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.trials));
    if (workers <= 1) {
        for (std::size_t t = 0; t < cfg.trials; ++t) records[t] = run_trial(cfg, t);
        return records;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t t = next++; t < cfg.trials; t = next++) {
                try {
                    records[t] = run_trial(cfg, t);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return records;
}

Summary summarize(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records) {
    Summary s;
    s.trials = records.size();
    if (records.empty()) return s;
    std::size_t ok = 0;
    std::size_t a1 = 0;
    std::size_t a2 = 0;
    double probes = 0.0;
    double rounds = 0.0;
    for (const auto& r : records) {
        ok += r.success;
        a1 += r.assumption1;
        a2 += r.assumption2;
        probes += static_cast<double>(r.probes_total);
        rounds += r.rounds_used;
        s.max_probes = std::max(s.max_probes, r.probes_total);
        const bool conditioned = r.assumption1 && (cfg.algo != Algo::general || r.assumption2);
        if ((conditioned && !r.success) || !r.within_bounds || !r.invariants_hold) ++s.violations;
    }
    const auto total = static_cast<double>(records.size());
    s.success_rate = ok / total;
    s.assumption1_rate = a1 / total;
    s.assumption2_rate = a2 / total;
    s.mean_probes = probes / total;
    s.mean_rounds = rounds / total;
    return s;
}

void print_summary(std::ostream& out, const Summary& s) {
    out << std::fixed << std::setprecision(4) << "trials=" << s.trials << " success_rate=" << s.success_rate
        << " mean_probes=" << s.mean_probes << " max_probes=" << s.max_probes << " mean_rounds=" << s.mean_rounds
        << " assumption1_rate=" << s.assumption1_rate << " assumption2_rate=" << s.assumption2_rate
        << " violations=" << s.violations << '\n';
    out.unsetf(std::ios::floatfield);
}

AssumptionRates measure_assumptions(const ExperimentConfig& cfg, std::size_t seeds, std::uint64_t seed_tag) {
    const Params params = cfg.params();
    const double s = fraction_s(cfg);
    const AuxSettings aux{std::max(1, static_cast<int>(std::lround(s))), s};
    AssumptionRates rates{cfg.c1, cfg.c2, seeds, 0, 0};
    const std::uint64_t master = mix_key(cfg.seed, seed_tag);
    for (std::size_t t = 0; t < seeds; ++t) {
        const Instance inst = gen_database(cfg.n, cfg.d, cfg.dataset, data_seed(master, t));
        const VirtualTables tables(inst.db, params, coin_for_trial(master, t, 0), aux);
        const ScaleSets sets = exact_sets(inst.query, inst.db, params, tables.main_bank(), &tables.aux_bank());
        if (check_assumption1(sets)) {
            ++rates.assumption1;
            if (check_assumption2(sets, s, params.n)) ++rates.joint;
        }
    }
    return rates;
}

CalibrationResult calibrate(const ExperimentConfig& cfg, const std::vector<double>& c1_grid,
                            const std::vector<double>& c2_grid, std::size_t seeds, double target) {
    constexpr std::uint64_t kCalibrationTag = 0x63616c69;  // "cali"
    CalibrationResult out;
    ExperimentConfig probe = cfg;
    for (double c1 : c1_grid) {
        probe.c1 = c1;
        out.c1_sweep.push_back(measure_assumptions(probe, seeds, kCalibrationTag));
        if (out.c1_sweep.back().assumption1_rate() >= target) {
            out.c1 = c1;
            break;
        }
    }
    if (!out.c1) return out;
    probe.c1 = *out.c1;
    for (double c2 : c2_grid) {
        probe.c2 = c2;
        out.c2_sweep.push_back(measure_assumptions(probe, seeds, kCalibrationTag));
        if (out.c2_sweep.back().joint_rate() >= target) {
            out.c2 = c2;
            break;
        }
    }
    return out;
}

}  // namespace annsim
