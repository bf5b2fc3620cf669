#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "lplab/lab.hpp"

using namespace lplab;

namespace {

int cmd_list() {
    for (const auto& id : experiment_ids()) std::cout << id << "\n";
    return 0;
}

// Quick invariant sweep: kernel registry audits, Young-function shape checks,
// sparse self-verification on a seeded corpus function.
int cmd_check() {
    bool ok = true;
    for (const char* kid : {"cancel:1:1", "cancel:2:1", "cancel:2:2", "nocancel:2:1"}) {
        MultilinearKernel k = kernel_from_id(kid);
        KernelReport kr = kernel_validate(k, 500, 12345);
        std::cout << "kernel " << kid << ": " << (kr.pass ? "ok" : "FAIL")
                  << " (A_obs=" << kr.A_obs << ")\n";
        ok = ok && kr.pass;
    }
    for (const char* yid : {"power:2", "logbump:2:0.5", "loglogbump:2:1", "dual:power:3"}) {
        try {
            young_from_id(yid).validate();
            std::cout << "young " << yid << ": ok\n";
        } catch (const std::exception& e) {
            std::cout << "young " << yid << ": FAIL (" << e.what() << ")\n";
            ok = false;
        }
    }
    DomainSpec d(1, 1.0, 128);
    auto grids = all_shifted_grids(d);
    LabRng rng(7);
    GridFunction f = corpus_function(d, rng);
    auto tops = level_cubes(grids.front(), grids.front().k_min);
    DyadicCube q0 = tops.front();
    for (const auto& q : tops)
        if (q.measure() > q0.measure()) q0 = q;
    try {
        LernerHytonen lh = lerner_hytonen(f, q0);
        SparseCheck sc = verify_sparse(lh.family);
        std::cout << "sparse decomposition: " << (sc.pass ? "ok" : "FAIL")
                  << " (min ratio " << sc.min_ratio << ")\n";
        ok = ok && sc.pass;
    } catch (const SelfVerificationFailed& e) {
        std::cout << "sparse decomposition: FAIL (" << e.what() << ")\n";
        ok = false;
    }
    std::cout << (ok ? "all checks passed" : "checks FAILED") << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"square-function experiment harness"};
    app.require_subcommand(1);

    app.add_subcommand("list", "list experiment ids");
    app.add_subcommand("check", "run the invariant suite");

    auto* run = app.add_subcommand("run", "run one experiment");
    std::string exp_id, config_path, out_path, csv_path;
    std::uint64_t seed = 0;
    bool have_seed = false;
    run->add_option("experiment", exp_id, "experiment id (see `list`)")->required();
    run->add_option("--config", config_path, "JSON config file");
    auto* seed_opt = run->add_option("--seed", seed, "RNG seed override");
    run->add_option("--out", out_path, "report JSON output path");
    run->add_option("--csv", csv_path, "per-case CSV output path");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("list")) return cmd_list();
    if (app.got_subcommand("check")) return cmd_check();

    have_seed = seed_opt->count() > 0;
    ExperimentConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot open config: " << config_path << "\n";
            return 2;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            cfg = ExperimentConfig::from_json(ss.str());
        } catch (const std::exception& e) {
            std::cerr << "bad config: " << e.what() << "\n";
            return 2;
        }
    }
    if (have_seed) cfg.seed = seed;

    try {
        ExperimentReport rep = run_experiment(exp_id, cfg);
        if (!out_path.empty()) {
            std::ofstream out(out_path);
            out << rep.to_json() << "\n";
        }
        if (!csv_path.empty()) {
            std::ofstream out(csv_path);
            out << rep.to_csv();
        }
        std::cout << exp_id << ": " << (rep.pass ? "pass" : "FAIL")
                  << " observed_constant=" << rep.observed_constant
                  << " wall_ms=" << rep.wall_ms << "\n";
        return rep.pass ? 0 : 1;
    } catch (const UnknownExperiment& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const HypothesisViolation& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
}
