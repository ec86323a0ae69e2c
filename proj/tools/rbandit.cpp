// Command-line front end: run experiments, time the two posterior
// implementations, and evaluate the regret bound.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>

#include "rbandit/config.hpp"
#include "rbandit/harness.hpp"

namespace {

using namespace rbandit;

int cmd_run(const std::string& path) {
    const ExperimentConfig cfg = load_config(path);
    const RegretCurve curve = run_experiment(cfg);
    write_outputs(cfg, curve);
    for (std::size_t p = 0; p < curve.labels.size(); ++p) {
        const int i = static_cast<int>(p);
        std::cout << curve.labels[p] << ": mean regret " << curve.mean_at(i, cfg.horizon) << " +- "
                  << curve.stderr_at(i, cfg.horizon) << " at n = " << cfg.horizon << '\n';
    }
    return 0;
}

int cmd_bench(const BenchConfig& cfg, const std::string& output) {
    const std::vector<TimingRow> rows = bench_runtime(cfg);
    if (output.empty() || output == "-") {
        write_timing_csv(std::cout, rows);
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + output);
        write_timing_csv(out, rows);
    }
    for (const TimingRow& row : rows)
        if (row.mismatched_runs > 0)
            std::cerr << "warning: K = " << row.num_arms << ": " << row.mismatched_runs
                      << " runs chose different arms under the two backends\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust contextual linear bandit simulator"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);

    BenchConfig bench_cfg;
    std::string bench_output;
    auto* bench = app.add_subcommand("bench", "Time the efficient and the augmented posterior");
    bench->add_option("--k-list", bench_cfg.k_list, "Numbers of arms")->delimiter(',');
    bench->add_option("--d", bench_cfg.dim, "Context dimension")->capture_default_str();
    bench->add_option("--horizon", bench_cfg.horizon, "Rounds per run")->capture_default_str();
    bench->add_option("--runs", bench_cfg.runs, "Runs per K")->capture_default_str();
    bench->add_option("--naive-runs", bench_cfg.naive_runs, "Runs per K for the augmented posterior (default: --runs)");
    bench->add_option("--naive-max-k", bench_cfg.naive_max_k, "Skip the augmented posterior above this K");
    bench->add_option("--sigma0", bench_cfg.env_sigma0, "Arm-effect std of the environment")->capture_default_str();
    bench->add_option("--s0-sq", bench_cfg.s0_sq, "Arm-effect variance assumed by RoLinTS")->capture_default_str();
    bench->add_option("--seed", bench_cfg.seed, "Master seed")->capture_default_str();
    bench->add_option("--output,-o", bench_output, "CSV destination (default: stdout)");

    HyperParams bound_hp;
    double sigma0 = 0.0, sigma = 1.0, context_bound = 1.0;
    int bound_k = 1, bound_d = 1;
    auto* bound = app.add_subcommand("bound", "Evaluate the regret upper bound");
    bound->add_option("--sigma0", sigma0, "Arm-effect std")->required();
    bound->add_option("--lambda", bound_hp.lambda, "Prior precision of theta")->required();
    bound->add_option("--sigma", sigma, "Reward noise std")->required();
    bound->add_option("--K", bound_k, "Number of arms")->required();
    bound->add_option("--d", bound_d, "Context dimension")->required();
    bound->add_option("--n", bound_hp.horizon, "Horizon")->required();
    bound->add_option("--L", context_bound, "Bound on context norms")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path);
        if (*bench) return cmd_bench(bench_cfg, bench_output);
        bound_hp.sigma0_sq = sigma0 * sigma0;
        bound_hp.sigma_sq = sigma * sigma;
        std::cout << format_double(regret_upper_bound(bound_hp, bound_k, bound_d, context_bound)) << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
