#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "annsim/harness.hpp"

using namespace annsim;

namespace {

struct RunOptions {
    ExperimentConfig cfg;
    std::string algo = "simple";
    std::string dataset = "uniform";
    std::string threshold = "midpoint";
    std::size_t plant_dist = 0;
    std::size_t plant_gap = 0;
    std::string out;
    std::string transcript;
};

void add_instance_options(CLI::App& cmd, RunOptions& o) {
    cmd.add_option("--algo", o.algo, "simple | general | near")->capture_default_str();
    cmd.add_option("--n", o.cfg.n, "database size")->capture_default_str();
    cmd.add_option("--d", o.cfg.d, "dimension")->capture_default_str();
    cmd.add_option("--gamma", o.cfg.gamma, "approximation factor")->capture_default_str();
    cmd.add_option("--k", o.cfg.k, "round budget")->capture_default_str();
    cmd.add_option("--c1", o.cfg.c1, "main sketch row constant")->capture_default_str();
    cmd.add_option("--c2", o.cfg.c2, "aux sketch row constant")->capture_default_str();
    cmd.add_option("--c", o.cfg.c, "large-k search constant")->capture_default_str();
    cmd.add_option("--lambda", o.cfg.lambda, "near-search radius");
    cmd.add_option("--dataset", o.dataset, "uniform | planted")->capture_default_str();
    cmd.add_option("--plant-dist", o.plant_dist, "distance of the planted neighbor");
    cmd.add_option("--plant-gap", o.plant_gap, "all other points lie farther than this");
    cmd.add_option("--override-s", o.cfg.override_s, "force the group size of the large-k search");
    cmd.add_option("--override-tau", o.cfg.override_tau, "force the branching factor of the large-k search");
    cmd.add_option("--trials", o.cfg.trials, "number of trials")->capture_default_str();
    cmd.add_option("--seed", o.cfg.seed, "master seed")->capture_default_str();
    cmd.add_option("--threshold", o.threshold, "midpoint | closed-form")->capture_default_str();
    cmd.add_option("--threads", o.cfg.threads, "worker threads, 0 = all cores")->capture_default_str();
}

void finish(RunOptions& o) {
    o.cfg.algo = parse_algo(o.algo);
    if (o.dataset == "uniform") {
        o.cfg.dataset.kind = DatasetSpec::Kind::uniform;
    } else if (o.dataset == "planted") {
        o.cfg.dataset.kind = DatasetSpec::Kind::planted;
    } else {
        throw ConfigError("unknown dataset: " + o.dataset);
    }
    o.cfg.dataset.plant_dist = o.plant_dist;
    o.cfg.dataset.plant_gap = o.plant_gap;
    try {
        o.cfg.threshold = parse_threshold_rule(o.threshold);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    o.cfg.validate();
}

int cmd_run(RunOptions& o) {
    finish(o);
    const auto records = run_experiment(o.cfg);
    if (o.out.empty() || o.out == "-") {
        write_csv(std::cout, records);
    } else {
        std::ofstream f(o.out);
        if (!f) throw ConfigError("cannot open " + o.out);
        write_csv(f, records);
    }
    if (!o.transcript.empty()) {
        std::ofstream f(o.transcript);
        if (!f) throw ConfigError("cannot open " + o.transcript);
        f << trial_transcript(o.cfg, 0);
    }
    const auto s = summarize(o.cfg, records);
    print_summary(std::cerr, s);
    return s.violations == 0 ? 0 : 1;
}

std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> out;
    for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
    return out;
}

int cmd_calibrate(RunOptions& o, std::size_t seeds, double target, double max_c) {
    finish(o);
    const auto result = calibrate(o.cfg, grid(4, max_c, 4), grid(4, max_c, 4), seeds, target);
    std::cout << "c1,c2,seeds,assumption1_rate,joint_rate\n";
    for (const auto* sweep : {&result.c1_sweep, &result.c2_sweep}) {
        for (const auto& r : *sweep) {
            std::cout << r.c1 << ',' << r.c2 << ',' << r.seeds << ',' << r.assumption1_rate() << ','
                      << r.joint_rate() << '\n';
        }
    }
    if (!result.c1 || !result.c2) {
        std::cerr << "no constants reach the target on the grid\n";
        return 1;
    }
    std::cerr << "c1=" << *result.c1 << " c2=" << *result.c2 << '\n';
    return 0;
}

int cmd_gen(RunOptions& o, const std::string& query_out) {
    finish(o);
    const auto inst = gen_database(o.cfg.n, o.cfg.d, o.cfg.dataset, o.cfg.seed);
    if (o.out.empty() || o.out == "-") {
        write_database(std::cout, inst.db);
    } else {
        std::ofstream f(o.out);
        if (!f) throw ConfigError("cannot open " + o.out);
        write_database(f, inst.db);
    }
    if (!query_out.empty()) {
        std::ofstream f(query_out);
        if (!f) throw ConfigError("cannot open " + query_out);
        f << inst.query.to_hex() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Round-limited approximate nearest-neighbor search in the cell-probe model"};
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "run trials and write one CSV row per trial");
    add_instance_options(*run_cmd, run);
    run_cmd->add_option("--out", run.out, "CSV path (default stdout)");
    run_cmd->add_option("--repeat", run.cfg.repeat, "independent repetitions per trial")->capture_default_str();
    run_cmd->add_option("--transcript", run.transcript, "write the probe transcript of trial 0 here");

    RunOptions cal;
    std::size_t cal_seeds = 200;
    double cal_target = 0.9;
    double cal_max = 200;
    auto* cal_cmd = app.add_subcommand("calibrate", "find sketch row constants meeting a target assumption rate");
    add_instance_options(*cal_cmd, cal);
    cal_cmd->add_option("--seeds", cal_seeds, "instances per grid point")->capture_default_str();
    cal_cmd->add_option("--target", cal_target, "required rate")->capture_default_str();
    cal_cmd->add_option("--max-c", cal_max, "largest constant tried")->capture_default_str();

    RunOptions gen;
    std::string gen_query;
    auto* gen_cmd = app.add_subcommand("gen", "write a generated database");
    add_instance_options(*gen_cmd, gen);
    gen_cmd->add_option("--out", gen.out, "database path (default stdout)");
    gen_cmd->add_option("--query-out", gen_query, "write the query point here");

    auto* self_cmd = app.add_subcommand("selftest", "run the built-in invariant suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*cal_cmd) return cmd_calibrate(cal, cal_seeds, cal_target, cal_max);
        if (*gen_cmd) return cmd_gen(gen, gen_query);
        if (*self_cmd) return selftest(std::cout) ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
