#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "seirctl/io/config.hpp"
#include "seirctl/io/csv.hpp"

namespace seirctl::io {
namespace {

TEST(Config, EmptyFileGivesCanonicalScenario) {
    const ScenarioConfig c = parse_config_string("# nothing here\n\n");
    EXPECT_EQ(c.beta, 0.2);
    EXPECT_EQ(c.gamma, 0.1887);
    EXPECT_EQ(c.mu, 0.1);
    EXPECT_EQ(c.init, EpiState::canonical());
    EXPECT_EQ(c.n_steps, 1000u);
    EXPECT_EQ(c.u_max, 0.9);
    EXPECT_EQ(c.solver, SolverChoice::direct);
}

TEST(Config, ParsesValuesCommentsAndBom) {
    const ScenarioConfig c = parse_config_string(
        "\xEF\xBB\xBF"
        "beta = 0.3   # faster spread\r\n"
        "  strategy=3\n"
        "kappa = 2.5\n"
        "solver = both\n"
        "out_dir = runs/a b\n");
    EXPECT_EQ(c.beta, 0.3);
    EXPECT_EQ(c.strategy, 3);
    EXPECT_EQ(c.weights.kappa, 2.5);
    EXPECT_EQ(c.solver, SolverChoice::both);
    EXPECT_EQ(c.out_dir, std::filesystem::path("runs/a b"));
    EXPECT_EQ(c.spec().strategy, Strategy::treatment_education);
}

TEST(Config, RejectsInitialStateThatDoesNotSumToOne) {
    try {
        parse_config_string("s0 = 0.8\ne0 = 0.05\ni0 = 0.05\nr0 = 0\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "s0");
        EXPECT_NE(std::string(e.what()).find("population conservation"), std::string::npos);
    }
}

TEST(Config, RejectsNonPositiveRate) {
    try {
        parse_config_string("beta = -0.1\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "beta");
        EXPECT_NE(std::string(e.what()).find("> 0"), std::string::npos);
    }
}

TEST(Config, ErrorsCarryLineNumbers) {
    auto line_of = [](const std::string& text) -> std::optional<std::size_t> {
        try {
            parse_config_string(text);
        } catch (const ConfigError& e) {
            return e.line();
        }
        return std::nullopt;
    };
    EXPECT_EQ(line_of("beta = 0.2\n\nbogus = 1\n"), 3u);
    EXPECT_EQ(line_of("# c\ngamma = fast\n"), 2u);
    EXPECT_EQ(line_of("mu 0.1\n"), 1u);
    EXPECT_EQ(line_of("mu = 0.1\nmu = 0.2\n"), 2u);
    EXPECT_EQ(line_of("n_steps = 0\n"), 1u);
    EXPECT_EQ(line_of("n_steps = 1.5\n"), 1u);
    EXPECT_EQ(line_of("solver = newton\n"), 1u);
    EXPECT_EQ(line_of("beta = 0.2 0.3\n"), 1u);
}

TEST(Config, RejectsOutOfRangeSettings) {
    EXPECT_THROW(parse_config_string("strategy = 4\n"), ConfigError);
    EXPECT_THROW(parse_config_string("u_max = 1.2\n"), ConfigError);
    EXPECT_THROW(parse_config_string("tau = 0\n"), ConfigError);
    EXPECT_THROW(parse_config_string("threshold = -1\n"), ConfigError);
    EXPECT_THROW(parse_config_string("out_dir =\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/scenario.cfg"), ConfigError);
}

TEST(Config, FormatRoundTrips) {
    ScenarioConfig c;
    c.beta = 0.31;
    c.init = {0.5, 0.25, 0.125, 0.125};
    c.strategy = 2;
    c.weights.a1 = 3.5;
    c.solver = SolverChoice::sweep;
    c.threshold = 0.02;
    c.out_dir = "elsewhere";
    const ScenarioConfig back = parse_config_string(format_config(c));
    EXPECT_EQ(format_config(back), format_config(c));
    EXPECT_EQ(back.init, c.init);
    EXPECT_EQ(back.weights.a1, 3.5);
}

TEST(Csv, FormatsTwelveSignificantDigits) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(100.0), "100");
}

TEST(Csv, UncontrolledTrajectoryLayout) {
    const Trajectory t = integrate_uncontrolled(ModelParams::canonical(), EpiState::canonical(), {0.0, 100.0, 10});
    std::ostringstream out;
    write_trajectory_csv(out, t);
    const std::string text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "t,S,E,I,R");
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 12);
    EXPECT_NE(text.find("\n0,0.88,0.07,0.05,0\n"), std::string::npos);
}

TEST(Csv, ControlledTrajectoryRoundTripsToTwelveDigits) {
    std::mt19937_64 rng(77);
    const std::size_t n = 50;
    const ControlSchedule sched = unpack_controls(Strategy::treatment_education, oracle::random_controls(rng, 2 * n, 0.9));
    const Trajectory t = integrate(VectorField::two_controls, ModelParams::canonical(), EpiState::canonical(), sched,
                                   {0.0, 100.0, n});
    std::stringstream buf;
    write_trajectory_csv(buf, t);
    const Trajectory back = read_trajectory_csv(buf);
    ASSERT_EQ(back.states.size(), t.states.size());
    ASSERT_TRUE(back.controls.has_value());
    ASSERT_EQ(back.controls->size(), n);
    EXPECT_EQ(back.grid.n_steps, n);
    EXPECT_DOUBLE_EQ(back.grid.t_end, 100.0);
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-11 * std::max(1.0, std::abs(a)); };
    for (std::size_t k = 0; k < t.states.size(); ++k) {
        EXPECT_TRUE(close(back.states[k].s, t.states[k].s));
        EXPECT_TRUE(close(back.states[k].e, t.states[k].e));
        EXPECT_TRUE(close(back.states[k].i, t.states[k].i));
        EXPECT_TRUE(close(back.states[k].r, t.states[k].r));
    }
    for (std::size_t k = 0; k < n; ++k) {
        EXPECT_TRUE(close((*back.controls)[k].u1, sched[k].u1));
        EXPECT_TRUE(close((*back.controls)[k].u2, sched[k].u2));
    }
}

TEST(Csv, ReaderRejectsMalformedInput) {
    std::istringstream bad_header("time,S\n0,1\n");
    EXPECT_THROW(read_trajectory_csv(bad_header), std::runtime_error);
    std::istringstream bad_cell("t,S,E,I,R\n0,1,0,0,x\n1,1,0,0,0\n");
    EXPECT_THROW(read_trajectory_csv(bad_cell), std::runtime_error);
    std::istringstream short_row("t,S,E,I,R\n0,1,0,0\n1,1,0,0,0\n");
    EXPECT_THROW(read_trajectory_csv(short_row), std::runtime_error);
}

TEST(Csv, ControlsAndConvergenceFiles) {
    std::ostringstream controls;
    write_controls_csv(controls, {0.0, 1.0, 2}, {{0.5, 0.0}, {0.25, 0.125}});
    EXPECT_EQ(controls.str(), "t,u1,u2\n0,0.5,0\n0.5,0.25,0.125\n");
    std::ostringstream conv;
    write_convergence_csv(conv, {2, 0.0, true, {3.0, 2.5, 2.25}});
    EXPECT_EQ(conv.str(), "iteration,objective\n0,3\n1,2.5\n2,2.25\n");
}

}  // namespace
}  // namespace seirctl::io
