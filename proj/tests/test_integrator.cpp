#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "seirctl/integrator.hpp"
#include "seirctl/objectives.hpp"
#include "seirctl/solver_direct.hpp"

namespace seirctl {
namespace {

const ModelParams kParams = ModelParams::canonical();
const EpiState kInit = EpiState::canonical();

double max_abs_diff(const EpiState& a, const EpiState& b) {
    return std::max({std::abs(a.s - b.s), std::abs(a.e - b.e), std::abs(a.i - b.i), std::abs(a.r - b.r)});
}

TEST(TimeGrid, StepAndValidation) {
    const TimeGrid g{0.0, 100.0, 1000};
    EXPECT_DOUBLE_EQ(g.step(), 0.1);
    EXPECT_DOUBLE_EQ(g.time(1000), 100.0);
    EXPECT_THROW((TimeGrid{5.0, 5.0, 10}.validate()), std::invalid_argument);
    EXPECT_THROW((TimeGrid{0.0, 1.0, 0}.validate()), std::invalid_argument);
}

TEST(Integrate, DiseaseFreeInitialStateStaysPut) {
    const EpiState init{0.7, 0.0, 0.0, 0.3};
    const Trajectory t = integrate_uncontrolled(kParams, init, {});
    ASSERT_EQ(t.states.size(), 1001u);
    for (const EpiState& x : t.states) EXPECT_EQ(x, init);
    EXPECT_FALSE(t.controls.has_value());
}

TEST(Integrate, CanonicalUncontrolledEndpoints) {
    const Trajectory t = integrate_uncontrolled(kParams, kInit, {0.0, 100.0, 1000});
    EXPECT_EQ(t.states.front(), kInit);
    EXPECT_NEAR(t.final_state().s, 0.173, 0.005);
    EXPECT_NEAR(t.final_state().r, 0.812, 0.005);
    double peak = 0.0;
    for (const EpiState& x : t.states) peak = std::max(peak, x.i);
    EXPECT_NEAR(peak, 0.14, 0.005);
}

TEST(Integrate, SingleStepAgreesWithFineEuler) {
    const double h = 0.1;
    for (VectorField f : {VectorField::uncontrolled, VectorField::vaccination, VectorField::two_controls}) {
        const ControlValue u = f == VectorField::uncontrolled ? ControlValue{} : ControlValue{0.6, 0.3};
        const std::vector<ControlValue> sched = f == VectorField::uncontrolled ? std::vector<ControlValue>{}
                                                                               : std::vector<ControlValue>{u};
        const Trajectory t = integrate(f, kParams, kInit, sched, {0.0, h, 1});
        // Richardson-extrapolated Euler: first-order error term cancels.
        const EpiState coarse = oracle::euler(f, kParams, kInit, u, h, 10000);
        const EpiState fine = oracle::euler(f, kParams, kInit, u, h, 20000);
        const EpiState ref = 2.0 * fine + -1.0 * coarse;
        EXPECT_LT(max_abs_diff(t.final_state(), ref), 1e-8);
    }
}

TEST(Integrate, FourthOrderConvergence) {
    auto endpoint = [](std::size_t n) { return integrate_uncontrolled(kParams, kInit, {0.0, 100.0, n}).final_state(); };
    for (std::size_t n : {200u, 1000u}) {
        const EpiState ref = endpoint(16 * n);
        const double ratio = max_abs_diff(endpoint(n), ref) / max_abs_diff(endpoint(2 * n), ref);
        EXPECT_GE(ratio, 12.0) << "n = " << n;
        EXPECT_LE(ratio, 20.0) << "n = " << n;
    }
}

TEST(Integrate, ConservesPopulationUnderRandomControls) {
    std::mt19937_64 rng(42);
    for (VectorField f : {VectorField::vaccination, VectorField::two_controls}) {
        const std::size_t n = 10000;
        const auto packed = oracle::random_controls(rng, 2 * n, 0.9);
        const ControlSchedule sched = unpack_controls(Strategy::treatment_education, packed);
        const Trajectory t = integrate(f, kParams, kInit, sched, {0.0, 100.0, n});
        for (const EpiState& x : t.states) {
            EXPECT_LT(std::abs(x.sum() - 1.0), 1e-9);
            EXPECT_GE(std::min({x.s, x.e, x.i, x.r}), -1e-9);
        }
    }
}

TEST(Integrate, IsBitwiseDeterministic) {
    std::mt19937_64 rng(5);
    const ControlSchedule sched = unpack_controls(Strategy::treatment_education, oracle::random_controls(rng, 2000, 0.9));
    const Trajectory a = integrate(VectorField::two_controls, kParams, kInit, sched, {});
    const Trajectory b = integrate(VectorField::two_controls, kParams, kInit, sched, {});
    EXPECT_EQ(a.states, b.states);
}

TEST(Integrate, RejectsMismatchedSchedules) {
    EXPECT_THROW(integrate(VectorField::vaccination, kParams, kInit, ControlSchedule(10), {0.0, 100.0, 11}),
                 std::invalid_argument);
    EXPECT_THROW(integrate(VectorField::uncontrolled, kParams, kInit, ControlSchedule(10), {0.0, 100.0, 10}),
                 std::invalid_argument);
}

TEST(Integrate, ReportsBlowUpWithStepIndex) {
    const ModelParams wild(1e200, 1e200, 1e200, 100.0);
    try {
        integrate_uncontrolled(wild, kInit, {0.0, 100.0, 10});
        FAIL() << "expected IntegrationError";
    } catch (const IntegrationError& e) {
        EXPECT_EQ(e.step(), 1u);
    }
}

TEST(Integrate, FlagsNegativeStatesInsteadOfClamping) {
    // h * beta * I is far outside the RK4 stability region.
    const ModelParams stiff(80.0, 0.1887, 0.1, 100.0);
    EXPECT_THROW(integrate_uncontrolled(stiff, {0.5, 0.0, 0.5, 0.0}, {0.0, 100.0, 20}), IntegrationError);
}

// -- Costate integration ----------------------------------------------------

Trajectory controlled_run(Strategy s, std::size_t n, double t_end, double level) {
    const ModelParams p(0.2, 0.1887, 0.1, t_end);
    const ControlSchedule sched(n, ControlValue{level, s == Strategy::treatment_education ? level : 0.0});
    return integrate(field_of(s), p, kInit, sched, {0.0, t_end, n});
}

TEST(Adjoint, CostateRhsMatchesHandDerivation) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> any(-3.0, 3.0);
    const ObjectiveWeights w{1.7, 0.4, 2.2, 0.9, 1.3, 0.6, 2.5};
    for (int trial = 0; trial < 300; ++trial) {
        const EpiState x = oracle::random_state(rng);
        const ControlValue u{std::abs(any(rng)) / 4, std::abs(any(rng)) / 4};
        const Costate l{any(rng), any(rng), any(rng), any(rng)};
        for (Strategy s : {Strategy::vaccination, Strategy::exposed_infected, Strategy::treatment_education}) {
            const Costate got = costate_rhs(s, kParams, w, x, u, l);
            const Costate want = oracle::costate_by_hand(s, kParams, w, x, u, l);
            EXPECT_NEAR(got.s, want.s, 1e-13);
            EXPECT_NEAR(got.e, want.e, 1e-13);
            EXPECT_NEAR(got.i, want.i, 1e-13);
            EXPECT_NEAR(got.r, want.r, 1e-13);
        }
    }
}

TEST(Adjoint, ZeroRunningCostGivesZeroCostate) {
    ObjectiveWeights w;
    w.a1 = w.a2 = 0.0;
    w.kappa = 0.0;
    for (Strategy s : {Strategy::exposed_infected, Strategy::treatment_education}) {
        const AdjointTrajectory adj = integrate_adjoint_backward(s, kParams, controlled_run(s, 1000, 100.0, 0.3), w);
        for (const Costate& l : adj.costates) EXPECT_EQ(l, Costate{});
    }
}

TEST(Adjoint, TerminalConditionIsExactlyZero) {
    for (Strategy s : {Strategy::vaccination, Strategy::exposed_infected, Strategy::treatment_education}) {
        const AdjointTrajectory adj = integrate_adjoint_backward(s, kParams, controlled_run(s, 1000, 100.0, 0.2), {});
        EXPECT_EQ(adj.costates.back(), Costate{});
        EXPECT_NE(adj.costates.front(), Costate{});
        EXPECT_EQ(adj.costates.front().r, 0.0);  // lambda_R' = 0
    }
}

TEST(Adjoint, RequiresControlledForwardTrajectory) {
    const Trajectory t = integrate_uncontrolled(kParams, kInit, {});
    EXPECT_THROW(integrate_adjoint_backward(Strategy::vaccination, kParams, t, {}), std::invalid_argument);
}

// The continuous costate yields h * (tau u_k + (lambda_R - lambda_S) S) per
// interval; it approaches the exact discrete gradient as the grid refines.
double continuous_gradient_error(std::size_t n) {
    OcpSpec spec = OcpSpec::canonical(Strategy::vaccination);
    spec.grid.n_steps = n;
    const Trajectory fwd = controlled_run(Strategy::vaccination, n, 100.0, 0.3);
    const AdjointTrajectory adj = integrate_adjoint_backward(Strategy::vaccination, kParams, fwd, spec.weights);
    const double h = spec.grid.step();
    std::vector<double> assembled(n);
    for (std::size_t k = 0; k < n; ++k) {
        auto switching = [&](std::size_t j) { return (adj.costates[j].r - adj.costates[j].s) * fwd.states[j].s; };
        assembled[k] = h * (spec.weights.tau * 0.3 + 0.5 * (switching(k) + switching(k + 1)));
    }
    const auto fd = oracle::finite_difference_gradient(spec, std::vector<double>(n, 0.3));
    return oracle::relative_error(assembled, fd);
}

TEST(Adjoint, ContinuousGradientConvergesToFiniteDifferences) {
    const double coarse = continuous_gradient_error(100);
    const double fine = continuous_gradient_error(400);
    EXPECT_LT(fine, coarse);
    EXPECT_LT(fine, 1e-2);
}

}  // namespace
}  // namespace seirctl
