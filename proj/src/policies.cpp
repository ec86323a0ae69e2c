#include "rbandit/policies.hpp"

#include <charconv>
#include <cmath>

namespace rbandit {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_number(std::string_view text) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("not a number: '" + std::string(text) + "'");
    return value;
}

}  // namespace

PolicyKind parse_policy_kind(std::string_view text) {
    if (text == "rolin_ucb") return PolicyKind::rolin_ucb;
    if (text == "rolin_ts") return PolicyKind::rolin_ts;
    if (text == "lin_ts") return PolicyKind::lin_ts;
    if (text == "bayes_lin_ucb") return PolicyKind::bayes_lin_ucb;
    throw ConfigError("unknown policy: " + std::string(text));
}

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::rolin_ucb: return "rolin_ucb";
        case PolicyKind::rolin_ts: return "rolin_ts";
        case PolicyKind::lin_ts: return "lin_ts";
        case PolicyKind::bayes_lin_ucb: return "bayes_lin_ucb";
    }
    return "?";
}

std::string PolicySpec::label() const {
    std::string out(to_string(kind));
    if (kind == PolicyKind::lin_ts) return out;
    out += ":" + format_double(s0_sq);
    if (kind == PolicyKind::bayes_lin_ucb && (delta > 0.0 || !finite_arms)) {
        out += ":" + format_double(delta);
        if (!finite_arms) out += ":general";
    }
    return out;
}

PolicySpec PolicySpec::parse(std::string_view text) {
    const auto parts = split(text, ':');
    PolicySpec spec;
    spec.kind = parse_policy_kind(parts[0]);
    if (parts.size() > 1) spec.s0_sq = parse_number(parts[1]);
    if (parts.size() > 2) {
        if (spec.kind != PolicyKind::bayes_lin_ucb) throw ConfigError("only bayes_lin_ucb takes a delta: " + std::string(text));
        spec.delta = parse_number(parts[2]);
    }
    if (parts.size() > 3) {
        if (parts[3] == "general") spec.finite_arms = false;
        else if (parts[3] != "finite") throw ConfigError("expected 'finite' or 'general': " + std::string(text));
    }
    if (parts.size() > 4) throw ConfigError("too many fields in policy: " + std::string(text));
    if (!(spec.s0_sq >= 0.0)) throw ConfigError("s0_sq must be nonnegative");
    if (spec.kind == PolicyKind::lin_ts && spec.s0_sq != 0.0) throw ConfigError("lin_ts takes no s0_sq");
    if (spec.delta < 0.0 || spec.delta >= 1.0) throw ConfigError("delta must lie in (0, 1)");
    return spec;
}

double ucb_index(double mu_hat, double tau_sq, int horizon) {
    if (horizon < 2) throw ConfigError("UCB index needs horizon >= 2");
    if (tau_sq < 0.0) throw std::invalid_argument("negative variance");
    return mu_hat + std::sqrt(2.0 * tau_sq * std::log(static_cast<double>(horizon)));
}

double ts_sample(double mu_hat, double tau_sq, Rng& rng) {
    if (tau_sq < 0.0) throw std::invalid_argument("negative variance");
    std::normal_distribution<double> normal(0.0, 1.0);
    return mu_hat + std::sqrt(tau_sq) * normal(rng);
}

int select_arm(std::span<const double> indices) {
    if (indices.empty()) throw std::invalid_argument("no arms to select from");
    int best = 0;
    for (std::size_t i = 1; i < indices.size(); ++i)
        if (indices[i] > indices[best]) best = static_cast<int>(i);
    return best;
}

double bayes_linucb_index(double mean, double sd, double delta, bool finite_arms, int dim) {
    if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in (0, 1]");
    const double log_term = std::log(1.0 / delta);
    const double alpha = finite_arms ? std::sqrt(2.0 * log_term) : std::sqrt(2.0 * dim * log_term);
    return mean + alpha * sd;
}

int choose_arm(const PolicySpec& spec, std::span<const Prediction> predictions, int horizon, int num_params,
               Rng& rng) {
    std::vector<double> index(predictions.size());
    switch (spec.kind) {
        case PolicyKind::rolin_ucb:
            for (std::size_t i = 0; i < predictions.size(); ++i)
                index[i] = ucb_index(predictions[i].mu_hat, predictions[i].tau_sq, horizon);
            break;
        case PolicyKind::rolin_ts:
        case PolicyKind::lin_ts:
            for (std::size_t i = 0; i < predictions.size(); ++i)
                index[i] = ts_sample(predictions[i].mu_hat, predictions[i].tau_sq, rng);
            break;
        case PolicyKind::bayes_lin_ucb: {
            const double delta = spec.delta > 0.0 ? spec.delta : 1.0 / horizon;
            for (std::size_t i = 0; i < predictions.size(); ++i)
                index[i] = bayes_linucb_index(predictions[i].mu_hat, std::sqrt(predictions[i].tau_sq), delta,
                                              spec.finite_arms, num_params);
            break;
        }
    }
    return select_arm(index);
}

}  // namespace rbandit
