#pragma once

// Scenario files: UTF-8 text, one `key = value` per line, `#` starts a
// comment. Unknown keys are rejected, missing keys keep the canonical
// scenario (beta 0.2, gamma 0.1887, mu 0.1, init 0.88/0.07/0.05/0).

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "seirctl/problem.hpp"

namespace seirctl::io {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::optional<std::size_t> line = std::nullopt,
                std::string key = {})
        : std::runtime_error(line ? "line " + std::to_string(*line) + ": " + what : what),
          line_(line), key_(std::move(key)) {}

    std::optional<std::size_t> line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::optional<std::size_t> line_;
    std::string key_;
};

enum class SolverChoice { direct, sweep, both };

inline const char* to_string(SolverChoice s) noexcept {
    switch (s) {
        case SolverChoice::direct: return "direct";
        case SolverChoice::sweep: return "sweep";
        case SolverChoice::both: return "both";
    }
    return "?";
}

inline std::optional<SolverChoice> parse_solver(std::string_view s) {
    if (s == "direct") return SolverChoice::direct;
    if (s == "sweep") return SolverChoice::sweep;
    if (s == "both") return SolverChoice::both;
    return std::nullopt;
}

struct ScenarioConfig {
    double beta = 0.2;
    double gamma = 0.1887;
    double mu = 0.1;
    double t_end = 100.0;
    std::size_t n_steps = 1000;
    EpiState init = EpiState::canonical();
    int strategy = 1;
    ObjectiveWeights weights{};
    double u_max = 0.9;
    SolverChoice solver = SolverChoice::direct;
    double threshold = 0.01;
    std::filesystem::path out_dir = "out";

    /// Throws ConfigError naming the offending key.
    void validate() const {
        auto positive = [](double v, const char* key) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be > 0", {}, key);
        };
        positive(beta, "beta");
        positive(gamma, "gamma");
        positive(mu, "mu");
        positive(t_end, "t_end");
        if (n_steps < 1) throw ConfigError("n_steps must be >= 1", {}, "n_steps");
        auto nonneg = [](double v, const char* key) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be >= 0", {}, key);
        };
        nonneg(init.s, "s0");
        nonneg(init.e, "e0");
        nonneg(init.i, "i0");
        nonneg(init.r, "r0");
        if (std::abs(init.sum() - kTotalPopulation) > kStateTolerance) {
            throw ConfigError("s0 + e0 + i0 + r0 must equal 1 (population conservation), got " +
                                  std::to_string(init.sum()),
                              {}, "s0");
        }
        if (strategy < 1 || strategy > 3) throw ConfigError("strategy must be 1, 2 or 3", {}, "strategy");
        positive(weights.tau, "tau");
        positive(weights.a1, "a1");
        positive(weights.a2, "a2");
        positive(weights.nu, "nu");
        positive(weights.kappa, "kappa");
        positive(weights.b1, "b1");
        positive(weights.b2, "b2");
        if (!(u_max > 0.0 && u_max <= 1.0)) throw ConfigError("u_max must lie in (0, 1]", {}, "u_max");
        if (!(threshold >= 0.0 && threshold <= 1.0)) {
            throw ConfigError("threshold must lie in [0, 1]", {}, "threshold");
        }
        if (out_dir.empty()) throw ConfigError("out_dir must not be empty", {}, "out_dir");
    }

    ModelParams params() const { return {beta, gamma, mu, t_end}; }
    TimeGrid grid() const { return {0.0, t_end, n_steps}; }

    OcpSpec spec() const {
        OcpSpec s;
        s.strategy = strategy_from_int(strategy);
        s.params = params();
        s.init = init;
        s.weights = weights;
        s.u_max = u_max;
        s.grid = grid();
        return s;
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view v, std::size_t line, const std::string& key) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError("value of '" + key + "' is not a number: '" + std::string(v) + "'", line, key);
    }
    return out;
}

inline long long parse_integer(std::string_view v, std::size_t line, const std::string& key) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError("value of '" + key + "' is not an integer: '" + std::string(v) + "'", line, key);
    }
    return out;
}

}  // namespace detail

inline ScenarioConfig parse_config(std::istream& in) {
    ScenarioConfig cfg;
    std::set<std::string> seen;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = raw;
        if (line == 1 && text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = detail::trim(text);
        if (text.empty()) continue;

        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line);
        const std::string key(detail::trim(text.substr(0, eq)));
        const std::string_view value = detail::trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key before '='", line);
        if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line, key);

        auto num = [&] { return detail::parse_double(value, line, key); };
        if (key == "beta") cfg.beta = num();
        else if (key == "gamma") cfg.gamma = num();
        else if (key == "mu") cfg.mu = num();
        else if (key == "t_end") cfg.t_end = num();
        else if (key == "n_steps") {
            const long long n = detail::parse_integer(value, line, key);
            if (n < 1) throw ConfigError("n_steps must be >= 1", line, key);
            cfg.n_steps = static_cast<std::size_t>(n);
        }
        else if (key == "s0") cfg.init.s = num();
        else if (key == "e0") cfg.init.e = num();
        else if (key == "i0") cfg.init.i = num();
        else if (key == "r0") cfg.init.r = num();
        else if (key == "strategy") cfg.strategy = static_cast<int>(detail::parse_integer(value, line, key));
        else if (key == "tau") cfg.weights.tau = num();
        else if (key == "a1") cfg.weights.a1 = num();
        else if (key == "a2") cfg.weights.a2 = num();
        else if (key == "nu") cfg.weights.nu = num();
        else if (key == "kappa") cfg.weights.kappa = num();
        else if (key == "b1") cfg.weights.b1 = num();
        else if (key == "b2") cfg.weights.b2 = num();
        else if (key == "u_max") cfg.u_max = num();
        else if (key == "solver") {
            const auto s = parse_solver(value);
            if (!s) throw ConfigError("solver must be direct, sweep or both", line, key);
            cfg.solver = *s;
        }
        else if (key == "threshold") cfg.threshold = num();
        else if (key == "out_dir") cfg.out_dir = std::string(value);
        else throw ConfigError("unknown key '" + key + "'", line, key);
    }
    cfg.validate();
    return cfg;
}

inline ScenarioConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse_config(in);
}

/// Serialises every key, in the canonical key order.
inline std::string format_config(const ScenarioConfig& c) {
    std::ostringstream out;
    out.precision(17);
    out << "beta = " << c.beta << "\ngamma = " << c.gamma << "\nmu = " << c.mu << "\nt_end = " << c.t_end
        << "\nn_steps = " << c.n_steps << "\ns0 = " << c.init.s << "\ne0 = " << c.init.e
        << "\ni0 = " << c.init.i << "\nr0 = " << c.init.r << "\nstrategy = " << c.strategy
        << "\ntau = " << c.weights.tau << "\na1 = " << c.weights.a1 << "\na2 = " << c.weights.a2
        << "\nnu = " << c.weights.nu << "\nkappa = " << c.weights.kappa << "\nb1 = " << c.weights.b1
        << "\nb2 = " << c.weights.b2 << "\nu_max = " << c.u_max << "\nsolver = " << to_string(c.solver)
        << "\nthreshold = " << c.threshold << "\nout_dir = " << c.out_dir.string() << "\n";
    return out.str();
}

}  // namespace seirctl::io
