#include "rbandit/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace rbandit {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_value(std::string_view text) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("bad value '" + std::string(text) + "'");
    return value;
}

bool parse_bool(std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("expected true or false, got '" + std::string(text) + "'");
}

std::vector<PolicySpec> parse_policies(std::string_view text) {
    std::vector<PolicySpec> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string_view item = trim(text.substr(start, comma - start));
        if (item.empty()) throw ConfigError("empty policy entry");
        out.push_back(PolicySpec::parse(item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table{
        {"K", [](ExperimentConfig& c, std::string_view v) { c.num_arms = parse_value<int>(v); }},
        {"d", [](ExperimentConfig& c, std::string_view v) { c.dim = parse_value<int>(v); }},
        {"horizon", [](ExperimentConfig& c, std::string_view v) { c.horizon = parse_value<int>(v); }},
        {"num_runs", [](ExperimentConfig& c, std::string_view v) { c.num_runs = parse_value<int>(v); }},
        {"env_sigma0", [](ExperimentConfig& c, std::string_view v) { c.env_sigma0 = parse_value<double>(v); }},
        {"env_sigma", [](ExperimentConfig& c, std::string_view v) { c.env_sigma = parse_value<double>(v); }},
        {"env_lambda", [](ExperimentConfig& c, std::string_view v) { c.env_lambda = parse_value<double>(v); }},
        {"policies", [](ExperimentConfig& c, std::string_view v) { c.policies = parse_policies(v); }},
        {"seed", [](ExperimentConfig& c, std::string_view v) { c.seed = parse_value<std::uint64_t>(v); }},
        {"context_kind", [](ExperimentConfig& c, std::string_view v) { c.context_kind = parse_context_kind(v); }},
        {"lowrank_noise", [](ExperimentConfig& c, std::string_view v) { c.lowrank_noise = parse_value<double>(v); }},
        {"perturb", [](ExperimentConfig& c, std::string_view v) { c.perturb = parse_bool(v); }},
        {"perturb_u_max", [](ExperimentConfig& c, std::string_view v) { c.perturb_u_max = parse_value<double>(v); }},
        {"output_path", [](ExperimentConfig& c, std::string_view v) { c.output_path = std::string(v); }},
        {"hyper_mode", [](ExperimentConfig& c, std::string_view v) { c.hyper_mode = parse_hyper_mode(v); }},
        {"warmup_rounds", [](ExperimentConfig& c, std::string_view v) { c.warmup_rounds = parse_value<int>(v); }},
        {"threads", [](ExperimentConfig& c, std::string_view v) { c.threads = parse_value<int>(v); }},
    };
    return table;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = "line " + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));

        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(where + "unknown key '" + std::string(key) + "'");
        if (!seen.insert(std::string(key)).second) throw ConfigError(where + "repeated key '" + std::string(key) + "'");
        try {
            it->second(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + std::string(key) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
    out << "K = " << cfg.num_arms << '\n'
        << "d = " << cfg.dim << '\n'
        << "horizon = " << cfg.horizon << '\n'
        << "num_runs = " << cfg.num_runs << '\n'
        << "env_sigma0 = " << format_double(cfg.env_sigma0) << '\n'
        << "env_sigma = " << format_double(cfg.env_sigma) << '\n'
        << "env_lambda = " << format_double(cfg.env_lambda) << '\n'
        << "policies = ";
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) out << (i ? ", " : "") << cfg.policies[i].label();
    out << '\n'
        << "seed = " << cfg.seed << '\n'
        << "context_kind = " << to_string(cfg.context_kind) << '\n'
        << "lowrank_noise = " << format_double(cfg.lowrank_noise) << '\n'
        << "perturb = " << (cfg.perturb ? "true" : "false") << '\n'
        << "perturb_u_max = " << format_double(cfg.perturb_u_max) << '\n'
        << "output_path = " << cfg.output_path << '\n'
        << "hyper_mode = " << to_string(cfg.hyper_mode) << '\n'
        << "warmup_rounds = " << cfg.warmup_rounds << '\n'
        << "threads = " << cfg.threads << '\n';
}

}  // namespace rbandit
