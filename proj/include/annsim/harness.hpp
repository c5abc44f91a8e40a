#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "annsim/alg_general.hpp"
#include "annsim/core.hpp"

namespace annsim {

/// Invalid experiment configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Algo { simple, general, near };

std::string_view to_string(Algo algo);
Algo parse_algo(std::string_view name);

struct DatasetSpec {
    enum class Kind { uniform, planted };
    Kind kind = Kind::uniform;
    /// planted: one point at exactly this distance from the query...
    std::size_t plant_dist = 0;
    /// ...and every other point farther than this.
    std::size_t plant_gap = 0;
};

struct Instance {
    Database db;
    Point query;
};

/// uniform: n distinct uniform points and a uniform query. planted: a uniform
/// query, one point at distance plant_dist, the rest at distances drawn
/// uniformly from (plant_gap, d].
Instance gen_database(std::size_t n, std::size_t d, const DatasetSpec& spec, std::uint64_t seed);

struct ExperimentConfig {
    Algo algo = Algo::simple;
    std::size_t n = 256;
    std::size_t d = 128;
    double gamma = 4.0;
    int k = 2;
    double c1 = 8.0;
    double c2 = 8.0;
    double c = 4.0;
    /// Radius of the near-neighbor search; defaults to the planted distance.
    std::optional<double> lambda;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    DatasetSpec dataset;
    int repeat = 1;
    std::optional<int> override_s;
    std::optional<int> override_tau;
    ThresholdRule threshold = ThresholdRule::midpoint;
    /// Worker threads; 0 picks the hardware concurrency.
    unsigned threads = 0;

    /// Throws ConfigError when the configuration cannot run.
    void validate() const;
    Params params() const;
    /// Only meaningful for Algo::general.
    GeneralParams general_params() const;
    double near_lambda() const;
};

/// One CSV row, plus in-memory diagnostics that are not serialized.
struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    Algo algo = Algo::simple;
    bool success = false;
    std::size_t probes_total = 0;
    int rounds_used = 0;
    bool assumption1 = false;
    bool assumption2 = false;
    std::size_t exact_dist = 0;
    /// -1 for a NO answer or a failed search.
    long long returned_dist = -1;

    /// Per-run probe and round bounds held for every repetition.
    bool within_bounds = true;
    /// Window and phase-progress invariants held (checked only when the
    /// assumptions hold).
    bool invariants_hold = true;
    bool assumption_violated = false;
    std::string note;
};

inline constexpr std::string_view kCsvHeader =
    "trial,seed,algo,success,probes_total,rounds_used,assumption1,assumption2,exact_dist,returned_dist";

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records);

TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t trial);

/// Probe transcript of the first repetition of one trial.
std::string trial_transcript(const ExperimentConfig& cfg, std::size_t trial);

/// Runs every trial (in parallel when threads allow) and returns the records
/// in trial order.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

struct Summary {
    std::size_t trials = 0;
    double success_rate = 0.0;
    double mean_probes = 0.0;
    std::size_t max_probes = 0;
    double mean_rounds = 0.0;
    double assumption1_rate = 0.0;
    double assumption2_rate = 0.0;
    /// Records that break a row-level invariant: a conditional-correctness
    /// miss, a probe/round bound, or a window/phase invariant.
    std::size_t violations = 0;
};

Summary summarize(const ExperimentConfig& cfg, const std::vector<TrialRecord>& records);
void print_summary(std::ostream& out, const Summary& s);

/// Empirical rates of the sketch-set assumptions for one (c1, c2) pair.
struct AssumptionRates {
    double c1 = 0.0;
    double c2 = 0.0;
    std::size_t seeds = 0;
    std::size_t assumption1 = 0;
    std::size_t joint = 0;

    double assumption1_rate() const { return seeds ? static_cast<double>(assumption1) / seeds : 0.0; }
    double joint_rate() const { return seeds ? static_cast<double>(joint) / seeds : 0.0; }
};

/// Measures assumption rates over `seeds` independent instances and coins.
/// The fraction exponent s comes from cfg.general_params() when cfg.algo is
/// general, else from cfg.override_s (default 2).
AssumptionRates measure_assumptions(const ExperimentConfig& cfg, std::size_t seeds, std::uint64_t seed_tag);

struct CalibrationResult {
    std::vector<AssumptionRates> c1_sweep;
    std::vector<AssumptionRates> c2_sweep;
    std::optional<double> c1;
    std::optional<double> c2;
};

/// Picks the smallest c1 in `c1_grid` whose assumption-1 rate reaches
/// `target`, then the smallest c2 in `c2_grid` whose joint rate reaches it.
CalibrationResult calibrate(const ExperimentConfig& cfg, const std::vector<double>& c1_grid,
                            const std::vector<double>& c2_grid, std::size_t seeds, double target);

/// Quick in-process invariant suites; prints one line per suite.
bool selftest(std::ostream& out);

}  // namespace annsim
