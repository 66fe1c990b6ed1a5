#pragma once

// seirctl command line: simulate | optimize | compare.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical
// failure (integration failure, solver error, or non-convergence without
// --allow-nonconverged).

#include <CLI11.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "seirctl/io/config.hpp"
#include "seirctl/io/csv.hpp"
#include "seirctl/metrics.hpp"
#include "seirctl/solver_direct.hpp"
#include "seirctl/solver_sweep.hpp"

namespace seirctl::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kNumericalFailure = 2 };

/// Raised when a solver stops before meeting its tolerance.
class NonConvergence : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void write_summary(std::ostream& out, const SummaryMetrics& m, const ConvergenceRecord* rec) {
    using io::format_number;
    auto period = [&](const char* key, const Period& p) {
        out << key << " = " << format_number(p.days) << '\n'
            << key << "_reached = " << (p.reached ? "true" : "false") << '\n';
    };
    out << "peak_infected = " << format_number(m.peak_infected.value) << '\n'
        << "peak_infected_time = " << format_number(m.peak_infected.time) << '\n'
        << "peak_exposed = " << format_number(m.peak_exposed.value) << '\n'
        << "peak_exposed_time = " << format_number(m.peak_exposed.time) << '\n'
        << "final_s = " << format_number(m.final_state.s) << '\n'
        << "final_e = " << format_number(m.final_state.e) << '\n'
        << "final_i = " << format_number(m.final_state.i) << '\n'
        << "final_r = " << format_number(m.final_state.r) << '\n';
    period("infection_period", m.infection_period);
    period("exposure_period", m.exposure_period);
    if (m.objective) out << "objective = " << format_number(*m.objective) << '\n';
    if (rec) {
        out << "iterations = " << rec->iterations << '\n'
            << "final_gradient_norm = " << format_number(rec->final_gradient_norm) << '\n'
            << "converged = " << (rec->converged ? "true" : "false") << '\n';
    }
}

inline void prepare_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw io::ConfigError("out_dir '" + dir.string() + "' is not writable", {}, "out_dir");
    }
}

inline void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    auto f = io::open_output(path);
    io::write_trajectory_csv(f, traj);
}

inline OptimalSolution run_solver(io::SolverChoice which, const OcpSpec& spec) {
    return which == io::SolverChoice::sweep ? solve_fbsm(spec) : solve_direct(spec);
}

inline void write_solution(const std::filesystem::path& dir, const std::string& tag, const OptimalSolution& sol,
                           double threshold) {
    write_trajectory(dir / ("trajectory_" + tag + ".csv"), sol.trajectory);
    {
        auto f = io::open_output(dir / ("controls_" + tag + ".csv"));
        io::write_controls_csv(f, sol.trajectory.grid, sol.controls);
    }
    {
        auto f = io::open_output(dir / ("convergence_" + tag + ".csv"));
        io::write_convergence_csv(f, sol.convergence);
    }
    auto f = io::open_output(dir / ("summary_" + tag + ".txt"));
    write_summary(f, summarize(sol.trajectory, threshold, sol.objective), &sol.convergence);
}

}  // namespace detail

inline int cmd_simulate(const io::ScenarioConfig& cfg, std::ostream& out) {
    detail::prepare_dir(cfg.out_dir);
    const Trajectory traj = integrate_uncontrolled(cfg.params(), cfg.init, cfg.grid());
    detail::write_trajectory(cfg.out_dir / "trajectory.csv", traj);
    const SummaryMetrics m = summarize(traj, cfg.threshold);
    auto f = io::open_output(cfg.out_dir / "summary.txt");
    detail::write_summary(f, m, nullptr);
    out << "simulate: S(t_end) = " << io::format_number(m.final_state.s)
        << ", R(t_end) = " << io::format_number(m.final_state.r)
        << ", max I = " << io::format_number(m.peak_infected.value) << '\n';
    return kSuccess;
}

inline int cmd_optimize(const io::ScenarioConfig& cfg, bool allow_nonconverged, std::ostream& out) {
    detail::prepare_dir(cfg.out_dir);
    const OcpSpec spec = cfg.spec();
    std::vector<std::pair<std::string, io::SolverChoice>> runs;
    if (cfg.solver != io::SolverChoice::sweep) runs.emplace_back("direct", io::SolverChoice::direct);
    if (cfg.solver != io::SolverChoice::direct) runs.emplace_back("sweep", io::SolverChoice::sweep);

    bool all_converged = true;
    for (const auto& [tag, which] : runs) {
        const OptimalSolution sol = detail::run_solver(which, spec);
        detail::write_solution(cfg.out_dir, tag, sol, cfg.threshold);
        all_converged = all_converged && sol.convergence.converged;
        out << "optimize[" << tag << "]: strategy " << cfg.strategy << ", J = " << io::format_number(sol.objective)
            << ", iterations = " << sol.convergence.iterations
            << (sol.convergence.converged ? "" : " (NOT converged)") << '\n';
    }
    if (!all_converged && !allow_nonconverged) {
        throw NonConvergence("solver did not converge (use --allow-nonconverged to accept)");
    }
    return kSuccess;
}

struct LabelledScenario {
    std::string label;
    io::ScenarioConfig config;
};

/// Runs every scenario and writes compare.csv (one row per run),
/// orderings.csv (one row per pair), and one trajectory per run into `out_dir`.
/// `uncontrolled` scenarios are simulated; the others are optimised.
inline ComparisonReport run_comparison(const std::vector<LabelledScenario>& scenarios,
                                       const std::vector<bool>& uncontrolled,
                                       const std::filesystem::path& out_dir, bool allow_nonconverged,
                                       std::ostream& out) {
    detail::prepare_dir(out_dir);
    std::vector<std::pair<std::string, SummaryMetrics>> rows;
    for (std::size_t j = 0; j < scenarios.size(); ++j) {
        const auto& [label, cfg] = scenarios[j];
        if (uncontrolled[j]) {
            const Trajectory traj = integrate_uncontrolled(cfg.params(), cfg.init, cfg.grid());
            detail::write_trajectory(out_dir / ("trajectory_" + label + ".csv"), traj);
            rows.emplace_back(label, summarize(traj, cfg.threshold));
            continue;
        }
        const auto which = cfg.solver == io::SolverChoice::sweep ? io::SolverChoice::sweep : io::SolverChoice::direct;
        const OptimalSolution sol = detail::run_solver(which, cfg.spec());
        if (!sol.convergence.converged && !allow_nonconverged) {
            throw NonConvergence("solver did not converge for '" + label + "'");
        }
        detail::write_trajectory(out_dir / ("trajectory_" + label + ".csv"), sol.trajectory);
        rows.emplace_back(label, summarize(sol.trajectory, cfg.threshold, sol.objective));
    }

    ComparisonReport report = compare(std::move(rows));
    using io::format_number;
    {
        auto f = io::open_output(out_dir / "compare.csv");
        f << "label,peak_infected,peak_infected_time,peak_exposed,peak_exposed_time,final_s,final_e,final_i,"
             "final_r,infection_period,infection_period_reached,exposure_period,exposure_period_reached,"
             "objective\n";
        for (const auto& [label, m] : report.runs) {
            f << label << ',' << format_number(m.peak_infected.value) << ',' << format_number(m.peak_infected.time)
              << ',' << format_number(m.peak_exposed.value) << ',' << format_number(m.peak_exposed.time) << ','
              << format_number(m.final_state.s) << ',' << format_number(m.final_state.e) << ','
              << format_number(m.final_state.i) << ',' << format_number(m.final_state.r) << ','
              << format_number(m.infection_period.days) << ',' << (m.infection_period.reached ? 1 : 0) << ','
              << format_number(m.exposure_period.days) << ',' << (m.exposure_period.reached ? 1 : 0) << ','
              << (m.objective ? format_number(*m.objective) : std::string()) << '\n';
        }
    }
    {
        auto f = io::open_output(out_dir / "orderings.csv");
        f << "first,second,lower_peak_infected,shorter_infection_period,higher_final_recovered\n";
        for (const PairwiseOrdering& p : report.pairs) {
            f << p.first << ',' << p.second << ',' << to_string(p.lower_peak_infected) << ','
              << to_string(p.shorter_infection_period) << ',' << to_string(p.higher_final_recovered) << '\n';
        }
    }
    for (const auto& [label, m] : report.runs) {
        out << label << ": max I = " << format_number(m.peak_infected.value)
            << ", R(t_end) = " << format_number(m.final_state.r) << ", infection period = "
            << (m.infection_period.reached ? format_number(m.infection_period.days) + " d"
                                           : "> " + format_number(m.infection_period.days) + " d")
            << (m.objective ? ", J = " + format_number(*m.objective) : std::string()) << '\n';
    }
    return report;
}

/// The canonical scenario without control and under each of the three strategies.
inline int cmd_compare_paper(const io::ScenarioConfig& base, bool allow_nonconverged, std::ostream& out) {
    std::vector<LabelledScenario> scenarios{{"uncontrolled", base}};
    for (int s = 1; s <= 3; ++s) {
        io::ScenarioConfig c = base;
        c.strategy = s;
        scenarios.push_back({"strategy" + std::to_string(s), c});
    }
    run_comparison(scenarios, {true, false, false, false}, base.out_dir, allow_nonconverged, out);
    return kSuccess;
}

namespace detail {

struct Overrides {
    std::optional<std::string> out;
    std::optional<std::string> solver;
};

inline io::ScenarioConfig with_overrides(io::ScenarioConfig cfg, const Overrides& o) {
    if (o.out) cfg.out_dir = *o.out;
    if (o.solver) cfg.solver = *io::parse_solver(*o.solver);
    cfg.validate();
    return cfg;
}

inline std::string unique_label(std::string stem, std::map<std::string, int>& used) {
    const int n = ++used[stem];
    return n == 1 ? stem : stem + "#" + std::to_string(n);
}

}  // namespace detail

/// Full command-line entry point; returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"SEIR epidemic simulation and optimal vaccination / treatment control", "seirctl"};
    app.require_subcommand(1);

    struct Common {
        std::vector<std::string> configs;
        std::optional<std::string> preset;
        detail::Overrides overrides;
        bool allow_nonconverged = false;
    };
    std::map<std::string, Common> opts;

    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        Common& c = opts[name];
        sub->add_option("--config", c.configs, "scenario file (key = value)")->check(CLI::ExistingFile);
        sub->add_option("--preset", c.preset, "built-in scenario")->check(CLI::IsMember({"paper"}));
        sub->add_option("--out", c.overrides.out, "output directory (overrides out_dir)");
        sub->add_option("--solver", c.overrides.solver, "optimizer")->check(CLI::IsMember({"direct", "sweep", "both"}));
        sub->add_flag("--allow-nonconverged", c.allow_nonconverged, "exit 0 even if a solver hits its iteration cap");
        return sub;
    };
    CLI::App* simulate = add("simulate", "integrate the uncontrolled model");
    CLI::App* optimize = add("optimize", "solve the optimal-control problem of the configured strategy");
    CLI::App* comp = add("compare", "compare uncontrolled and optimised runs");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        auto load = [](const std::string& path) { return io::load_config(path); };
        if (simulate->parsed() || optimize->parsed()) {
            const Common& c = opts[simulate->parsed() ? "simulate" : "optimize"];
            if (c.configs.size() > 1) throw io::ConfigError("only one --config is accepted here");
            if (c.preset && !c.configs.empty()) throw io::ConfigError("--preset and --config are mutually exclusive");
            io::ScenarioConfig cfg = c.configs.empty() ? io::ScenarioConfig{} : load(c.configs.front());
            cfg = detail::with_overrides(cfg, c.overrides);
            return simulate->parsed() ? cmd_simulate(cfg, out) : cmd_optimize(cfg, c.allow_nonconverged, out);
        }
        if (comp->parsed()) {
            const Common& c = opts["compare"];
            if (c.configs.empty()) {
                return cmd_compare_paper(detail::with_overrides(io::ScenarioConfig{}, c.overrides),
                                         c.allow_nonconverged, out);
            }
            if (c.preset) throw io::ConfigError("--preset and --config are mutually exclusive for compare");
            std::vector<LabelledScenario> scenarios;
            std::map<std::string, int> used;
            for (const std::string& path : c.configs) {
                scenarios.push_back({detail::unique_label(std::filesystem::path(path).stem().string(), used),
                                     detail::with_overrides(load(path), c.overrides)});
            }
            if (scenarios.size() < 2) throw io::ConfigError("compare needs at least two --config files");
            const std::filesystem::path dir = scenarios.front().config.out_dir;
            run_comparison(scenarios, std::vector<bool>(scenarios.size(), false), dir, c.allow_nonconverged, out);
            return kSuccess;
        }
    } catch (const io::ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kUsageError;
    } catch (const IntegrationError& e) {
        err << "integration failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const NonConvergence& e) {
        err << "non-convergence: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kUsageError;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace seirctl::cli
