#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rbandit/env.hpp"
#include "rbandit/policies.hpp"
#include "rbandit/types.hpp"

namespace rbandit {

enum class HyperMode { known, estimated };

HyperMode parse_hyper_mode(std::string_view text);
std::string_view to_string(HyperMode mode);

/// Which posterior implementation drives a policy.
enum class Backend { efficient, naive };

struct ExperimentConfig {
    int num_arms = 50;
    int dim = 10;
    int horizon = 3000;
    int num_runs = 100;
    double env_sigma0 = 0.0;  ///< std of the arm effects
    double env_sigma = 1.0;   ///< reward noise std
    double env_lambda = 1.0;  ///< prior precision of theta
    std::vector<PolicySpec> policies;
    std::uint64_t seed = 1;
    ContextKind context_kind = ContextKind::uniform_box;
    double lowrank_noise = 0.0;
    bool perturb = false;
    double perturb_u_max = 3.0;
    std::string output_path;  ///< output directory; empty writes nothing
    HyperMode hyper_mode = HyperMode::known;
    int warmup_rounds = -1;   ///< estimated mode only; < 0 means 5 d pulls per arm
    int threads = 1;

    void validate() const;

    /// Environment hyper-parameters (variances, not standard deviations).
    HyperParams env_params() const;

    /// Warm-up length actually used in estimated mode.
    int effective_warmup() const;
};

/// Per-round cumulative pseudo-regret of every (policy, run).
struct RegretCurve {
    std::vector<std::string> labels;
    int num_runs = 0;
    int horizon = 0;
    /// cum[p][run][t - 1]
    std::vector<std::vector<std::vector<double>>> cum;

    /// Mean over runs of the cumulative regret after round t (1-based).
    double mean_at(int policy, int t) const;
    /// Standard error of that mean (0 with a single run).
    double stderr_at(int policy, int t) const;
};

/// Arms pulled and cumulative regret of one policy over one run.
struct PolicyTrace {
    std::vector<int> arms;
    std::vector<double> cum_regret;
    HyperParams final_params;  ///< hyper-parameters in force at the end
};

struct PolicyRunOptions {
    Backend backend = Backend::efficient;
    /// Round-robin pulls before the policy takes over; with
    /// estimate_hyper the moment estimates replace sigma^2, sigma0^2 and
    /// lambda once the warm-up ends and stay frozen afterwards.
    int warmup_rounds = 0;
    bool estimate_hyper = false;
};

/// Plays one policy against one instance for alg_hp.horizon rounds.
///
/// Contexts come from a stream seeded with `context_seed`, so every policy
/// given the same seed sees the same contexts. TS draws and reward noise
/// come from `policy_rng`. The estimator runs with alg_hp except that
/// sigma0^2 is replaced by spec.effective_s0_sq().
PolicyTrace run_policy(const EnvironmentInstance& inst, const PolicySpec& spec, const HyperParams& alg_hp,
                       std::uint64_t context_seed, Rng& policy_rng, const PolicyRunOptions& options = {});

/// Runs cfg.num_runs independent runs. Each run samples a fresh instance;
/// all policies in a run share the instance and the context stream but own
/// their estimator and random stream. Substream seeds come from
/// derive_seed(cfg.seed, run, stream), stream = policy index for policies.
RegretCurve run_experiment(const ExperimentConfig& cfg);

/// Writes curves.csv and summary.csv into cfg.output_path (created if
/// missing). Does nothing when output_path is empty.
void write_outputs(const ExperimentConfig& cfg, const RegretCurve& curve);

/// policy,run,round,cum_regret
void write_curves_csv(std::ostream& out, const RegretCurve& curve);
/// policy,round,mean_regret,stderr
void write_summary_csv(std::ostream& out, const RegretCurve& curve);

/// Regret upper bound for RoLinUCB / RoLinTS with known hyper-parameters:
///
///   sigma_max sqrt(2 c (d + K) n log n) + sqrt(2 / pi) sigma_max K
///
/// with sigma_max^2 = sigma0^2 + L^2 / lambda and
/// c = log(1 + sigma_max^2 n / (sigma^2 (d + K))) / log(1 + sigma_max^2 / sigma^2).
double regret_upper_bound(const HyperParams& hp, int num_arms, int dim, double context_bound);

/// Multiplies or divides lambda and sigma (not sigma^2) independently by
/// u ~ U[1, u_max], each direction with probability 1/2. sigma0^2 and the
/// horizon are unchanged.
HyperParams perturb_hyperparams(const HyperParams& hp, Rng& rng, double u_max = 3.0);

struct BenchConfig {
    std::vector<int> k_list{16, 32, 64, 128, 256, 512, 1024};
    int dim = 10;
    int horizon = 500;
    int runs = 100;
    int naive_runs = -1;       ///< < 0 means `runs`
    int naive_max_k = 1 << 30; ///< naive timing skipped (NaN) above this K
    double env_sigma0 = 0.5;
    double s0_sq = 0.25;
    std::uint64_t seed = 1;
};

struct TimingRow {
    int num_arms = 0;
    double efficient_seconds = 0.0;
    double naive_seconds = 0.0;  ///< NaN when skipped
    int efficient_runs = 0;
    int naive_runs = 0;
    int mismatched_runs = 0;     ///< runs where the two backends chose differently
};

/// Wall-clock time of RoLinTS with the efficient estimator and with the
/// augmented regression on the uniform_box setup, one row per K. Both
/// backends replay identical seeds, and their arm choices are compared.
std::vector<TimingRow> bench_runtime(const BenchConfig& cfg);

/// K,efficient_seconds,naive_seconds
void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows);

}  // namespace rbandit
