#include "rbandit/harness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include "rbandit/estimator.hpp"
#include "rbandit/hyperparam.hpp"
#include "rbandit/naive.hpp"

namespace rbandit {

namespace {

constexpr std::uint64_t kInstanceStream = std::uint64_t{1} << 62;
constexpr std::uint64_t kContextStream = kInstanceStream + 1;

// Smallest noise variance an estimator is ever given. Keeps a noiseless
// environment (or a zero moment estimate) from producing an invalid model.
constexpr double kMinAlgSigmaSq = 1e-6;

class EfficientModel {
public:
    EfficientModel(int num_arms, int dim, const HyperParams& hp) : est_(num_arms, dim, hp) {}

    std::vector<Prediction> predict_all(const Eigen::MatrixXd& contexts) const {
        return est_.predict_all(contexts, est_.recompute());
    }
    void update(int arm, const Eigen::Ref<const Eigen::VectorXd>& x, double r) { est_.update(arm, x, r); }
    void set_params(const HyperParams& hp) { est_.set_params(hp); }

private:
    RobustEstimator est_;
};

class NaiveModel {
public:
    NaiveModel(int num_arms, int dim, const HyperParams& hp) : reg_(num_arms, dim, hp) {}

    std::vector<Prediction> predict_all(const Eigen::MatrixXd& contexts) const { return reg_.predict_all(contexts); }
    void update(int arm, const Eigen::Ref<const Eigen::VectorXd>& x, double r) { reg_.update(arm, x, r); }
    void set_params(const HyperParams&) { throw ConfigError("the naive backend cannot change hyper-parameters"); }

private:
    AugmentedRegression reg_;
};

template <class Model>
PolicyTrace play(const EnvironmentInstance& inst, const PolicySpec& spec, HyperParams hp,
                 std::uint64_t context_seed, Rng& rng, const PolicyRunOptions& options) {
    const int K = inst.num_arms();
    const int d = inst.dim();
    const int n = hp.horizon;
    Model model(K, d, hp);
    Rng context_rng(context_seed);

    PolicyTrace trace;
    trace.arms.reserve(n);
    trace.cum_regret.reserve(n);
    std::vector<Observation> log;
    if (options.estimate_hyper) log.reserve(options.warmup_rounds);

    double cum = 0.0;
    for (int t = 1; t <= n; ++t) {
        const RoundContext ctx = sample_contexts(inst, t, context_rng);
        int arm;
        if (t <= options.warmup_rounds) {
            arm = (t - 1) % K;
        } else {
            const std::vector<Prediction> preds = model.predict_all(ctx.contexts);
            arm = choose_arm(spec, preds, n, d + K, rng);
        }
        const Eigen::VectorXd x = ctx.contexts.row(arm).transpose();
        const double r = sample_reward(inst, arm, x, rng);
        model.update(arm, x, r);
        cum += regret_increment(inst, ctx, arm);
        trace.arms.push_back(arm);
        trace.cum_regret.push_back(cum);

        if (options.estimate_hyper && t <= options.warmup_rounds) {
            log.push_back({arm, x, r});
            if (t == options.warmup_rounds) {
                const MomentEstimates est = estimate_moments(log, K, d);
                hp.lambda = est.lambda_fixed;
                hp.sigma_sq = std::max(est.sigma_sq_hat, kMinAlgSigmaSq);
                hp.sigma0_sq = spec.kind == PolicyKind::lin_ts ? 0.0 : est.sigma0_sq_hat;
                model.set_params(hp);
            }
        }
    }
    trace.final_params = hp;
    return trace;
}

}  // namespace

HyperMode parse_hyper_mode(std::string_view text) {
    if (text == "known") return HyperMode::known;
    if (text == "estimated") return HyperMode::estimated;
    throw ConfigError("unknown hyper_mode: " + std::string(text));
}

std::string_view to_string(HyperMode mode) { return mode == HyperMode::estimated ? "estimated" : "known"; }

void ExperimentConfig::validate() const {
    if (num_arms < 1 || dim < 1) throw ConfigError("need K >= 1 and d >= 1");
    if (horizon < 1) throw ConfigError("horizon must be at least 1");
    if (num_runs < 1) throw ConfigError("num_runs must be at least 1");
    if (!(env_sigma0 >= 0.0) || !(env_sigma >= 0.0)) throw ConfigError("standard deviations must be nonnegative");
    if (!(env_lambda > 0.0)) throw ConfigError("env_lambda must be positive");
    if (!(lowrank_noise >= 0.0)) throw ConfigError("lowrank_noise must be nonnegative");
    if (policies.empty()) throw ConfigError("at least one policy is required");
    if (perturb && !(perturb_u_max >= 1.0)) throw ConfigError("perturb_u_max must be at least 1");
    if (threads < 1) throw ConfigError("threads must be at least 1");
    if (hyper_mode == HyperMode::estimated) {
        if (perturb) throw ConfigError("perturb applies to known hyper-parameters only");
        const int warmup = effective_warmup();
        if (warmup < 1 || warmup > horizon)
            throw ConfigError("warm-up of " + std::to_string(warmup) + " rounds does not fit the horizon");
    }
    for (const PolicySpec& p : policies)
        if ((p.kind == PolicyKind::rolin_ucb || p.kind == PolicyKind::bayes_lin_ucb) && horizon < 2)
            throw ConfigError("UCB policies need horizon >= 2");
}

HyperParams ExperimentConfig::env_params() const {
    return {env_lambda, env_sigma0 * env_sigma0, env_sigma * env_sigma, horizon};
}

int ExperimentConfig::effective_warmup() const { return warmup_rounds >= 0 ? warmup_rounds : 5 * dim * num_arms; }

double RegretCurve::mean_at(int policy, int t) const {
    double sum = 0.0;
    for (const auto& run : cum[policy]) sum += run[t - 1];
    return sum / num_runs;
}

double RegretCurve::stderr_at(int policy, int t) const {
    if (num_runs < 2) return 0.0;
    const double mean = mean_at(policy, t);
    double ss = 0.0;
    for (const auto& run : cum[policy]) ss += (run[t - 1] - mean) * (run[t - 1] - mean);
    return std::sqrt(ss / (num_runs - 1) / num_runs);
}

PolicyTrace run_policy(const EnvironmentInstance& inst, const PolicySpec& spec, const HyperParams& alg_hp,
                       std::uint64_t context_seed, Rng& policy_rng, const PolicyRunOptions& options) {
    HyperParams hp = alg_hp;
    hp.sigma0_sq = spec.effective_s0_sq();
    if (options.warmup_rounds < 0 || options.warmup_rounds > hp.horizon)
        throw ConfigError("warm-up must lie within the horizon");
    if (options.estimate_hyper && options.warmup_rounds < 1) throw ConfigError("estimation needs a warm-up");
    if (options.backend == Backend::naive) {
        if (options.estimate_hyper) throw ConfigError("the naive backend cannot estimate hyper-parameters");
        return play<NaiveModel>(inst, spec, hp, context_seed, policy_rng, options);
    }
    return play<EfficientModel>(inst, spec, hp, context_seed, policy_rng, options);
}

RegretCurve run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const int P = static_cast<int>(cfg.policies.size());
    RegretCurve curve;
    curve.num_runs = cfg.num_runs;
    curve.horizon = cfg.horizon;
    for (const PolicySpec& p : cfg.policies) curve.labels.push_back(p.label());
    curve.cum.assign(P, std::vector<std::vector<double>>(cfg.num_runs));

    PolicyRunOptions options;
    if (cfg.hyper_mode == HyperMode::estimated) {
        options.estimate_hyper = true;
        options.warmup_rounds = cfg.effective_warmup();
    }

    const HyperParams env_hp = cfg.env_params();
    auto do_run = [&](int run) {
        Rng instance_rng(derive_seed(cfg.seed, run, kInstanceStream));
        const EnvironmentInstance inst =
            sample_instance(cfg.num_arms, cfg.dim, env_hp, cfg.context_kind, instance_rng, cfg.lowrank_noise);
        const std::uint64_t context_seed = derive_seed(cfg.seed, run, kContextStream);
        for (int p = 0; p < P; ++p) {
            Rng rng(derive_seed(cfg.seed, run, p));
            HyperParams alg{cfg.env_lambda, cfg.policies[p].effective_s0_sq(),
                            std::max(env_hp.sigma_sq, kMinAlgSigmaSq), cfg.horizon};
            if (cfg.perturb) alg = perturb_hyperparams(alg, rng, cfg.perturb_u_max);
            curve.cum[p][run] = run_policy(inst, cfg.policies[p], alg, context_seed, rng, options).cum_regret;
        }
    };

    const int workers = std::min(cfg.threads, cfg.num_runs);
    if (workers == 1) {
        for (int run = 0; run < cfg.num_runs; ++run) do_run(run);
        return curve;
    }

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int run = next++; run < cfg.num_runs; run = next++) {
                try {
                    do_run(run);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
    return curve;
}

void write_curves_csv(std::ostream& out, const RegretCurve& curve) {
    out << "policy,run,round,cum_regret\n";
    for (std::size_t p = 0; p < curve.labels.size(); ++p)
        for (int run = 0; run < curve.num_runs; ++run)
            for (int t = 1; t <= curve.horizon; ++t)
                out << curve.labels[p] << ',' << run << ',' << t << ',' << format_double(curve.cum[p][run][t - 1])
                    << '\n';
}

void write_summary_csv(std::ostream& out, const RegretCurve& curve) {
    out << "policy,round,mean_regret,stderr\n";
    for (std::size_t p = 0; p < curve.labels.size(); ++p)
        for (int t = 1; t <= curve.horizon; ++t)
            out << curve.labels[p] << ',' << t << ',' << format_double(curve.mean_at(static_cast<int>(p), t)) << ','
                << format_double(curve.stderr_at(static_cast<int>(p), t)) << '\n';
}

void write_outputs(const ExperimentConfig& cfg, const RegretCurve& curve) {
    if (cfg.output_path.empty()) return;
    const std::filesystem::path dir(cfg.output_path);
    std::filesystem::create_directories(dir);
    auto open = [](const std::filesystem::path& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        return out;
    };
    {
        auto out = open(dir / "curves.csv");
        write_curves_csv(out, curve);
        if (!out) throw std::runtime_error("write failed: curves.csv");
    }
    auto out = open(dir / "summary.csv");
    write_summary_csv(out, curve);
    if (!out) throw std::runtime_error("write failed: summary.csv");
}

double regret_upper_bound(const HyperParams& hp, int num_arms, int dim, double context_bound) {
    hp.validate();
    if (num_arms < 1 || dim < 1) throw ConfigError("need K >= 1 and d >= 1");
    const double smax_sq = hp.sigma0_sq + context_bound * context_bound / hp.lambda;
    if (smax_sq == 0.0) return 0.0;
    const double smax = std::sqrt(smax_sq);
    const double p = dim + num_arms;
    const double n = hp.horizon;
    const double c = std::log1p(smax_sq * n / (hp.sigma_sq * p)) / std::log1p(smax_sq / hp.sigma_sq);
    return smax * std::sqrt(2.0 * c * p * n * std::log(n)) + std::sqrt(2.0 / std::numbers::pi) * smax * num_arms;
}

HyperParams perturb_hyperparams(const HyperParams& hp, Rng& rng, double u_max) {
    if (!(u_max >= 1.0)) throw ConfigError("u_max must be at least 1");
    std::uniform_real_distribution<double> uniform(1.0, u_max);
    std::bernoulli_distribution coin(0.5);
    auto factor = [&] {
        const double u = u_max == 1.0 ? 1.0 : uniform(rng);
        return coin(rng) ? u : 1.0 / u;
    };
    HyperParams out = hp;
    out.lambda *= factor();
    const double f = factor();
    out.sigma_sq *= f * f;
    return out;
}

}  // namespace rbandit
