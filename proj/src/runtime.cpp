#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "rbandit/harness.hpp"

namespace rbandit {

namespace {

constexpr std::uint64_t kBenchInstanceStream = std::uint64_t{1} << 61;
constexpr std::uint64_t kBenchContextStream = kBenchInstanceStream + 1;
constexpr std::uint64_t kBenchPolicyStream = kBenchInstanceStream + 2;

struct Timed {
    double seconds = 0.0;
    std::vector<std::vector<int>> arms;
};

Timed time_backend(const BenchConfig& cfg, int num_arms, int runs, Backend backend) {
    const HyperParams env_hp{1.0, cfg.env_sigma0 * cfg.env_sigma0, 1.0, cfg.horizon};
    const HyperParams alg_hp{1.0, cfg.s0_sq, 1.0, cfg.horizon};
    const PolicySpec spec{PolicyKind::rolin_ts, cfg.s0_sq};
    PolicyRunOptions options;
    options.backend = backend;

    // Instance sampling stays outside the timed region.
    std::vector<EnvironmentInstance> instances;
    for (int run = 0; run < runs; ++run) {
        Rng rng(derive_seed(cfg.seed, run, kBenchInstanceStream));
        instances.push_back(sample_instance(num_arms, cfg.dim, env_hp, ContextKind::uniform_box, rng));
    }

    Timed out;
    const auto start = std::chrono::steady_clock::now();
    for (int run = 0; run < runs; ++run) {
        Rng rng(derive_seed(cfg.seed, run, kBenchPolicyStream));
        const std::uint64_t context_seed = derive_seed(cfg.seed, run, kBenchContextStream);
        out.arms.push_back(run_policy(instances[run], spec, alg_hp, context_seed, rng, options).arms);
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace

std::vector<TimingRow> bench_runtime(const BenchConfig& cfg) {
    if (cfg.k_list.empty()) throw ConfigError("empty K list");
    if (cfg.dim < 1 || cfg.horizon < 1 || cfg.runs < 1) throw ConfigError("need d, horizon and runs >= 1");
    if (!(cfg.s0_sq > 0.0)) throw ConfigError("the naive backend needs s0_sq > 0");
    const int naive_runs = cfg.naive_runs < 0 ? cfg.runs : cfg.naive_runs;

    std::vector<TimingRow> rows;
    for (int K : cfg.k_list) {
        if (K < 1) throw ConfigError("K must be positive");
        TimingRow row;
        row.num_arms = K;
        const Timed eff = time_backend(cfg, K, cfg.runs, Backend::efficient);
        row.efficient_seconds = eff.seconds;
        row.efficient_runs = cfg.runs;
        row.naive_seconds = std::numeric_limits<double>::quiet_NaN();
        if (K <= cfg.naive_max_k && naive_runs > 0) {
            const Timed naive = time_backend(cfg, K, naive_runs, Backend::naive);
            row.naive_seconds = naive.seconds;
            row.naive_runs = naive_runs;
            for (int run = 0; run < naive_runs && run < cfg.runs; ++run)
                if (naive.arms[run] != eff.arms[run]) ++row.mismatched_runs;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows) {
    out << "K,efficient_seconds,naive_seconds\n";
    for (const TimingRow& row : rows)
        out << row.num_arms << ',' << format_double(row.efficient_seconds) << ','
            << (std::isnan(row.naive_seconds) ? std::string("nan") : format_double(row.naive_seconds)) << '\n';
}

}  // namespace rbandit
