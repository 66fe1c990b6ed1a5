#pragma once

// Forward-backward sweep from the Pontryagin conditions: integrate the
// state forward, the costate backward from lambda(t_end) = 0, then move the
// control toward the pointwise minimiser of the Hamiltonian.

#include <algorithm>
#include <cmath>

#include "seirctl/problem.hpp"

namespace seirctl {

/// H = running cost + lambda . f(x, u)
inline double hamiltonian(Strategy strategy, const ModelParams& params, const ObjectiveWeights& weights,
                          const EpiState& x, const Costate& lambda, const ControlValue& u) {
    const EpiState f = rhs(field_of(strategy), x, params, u);
    return state_cost(strategy, weights, x) + control_cost(strategy, weights, u) +
           lambda.s * f.s + lambda.e * f.e + lambda.i * f.i + lambda.r * f.r;
}

/// Zero of dH/du before clamping. H is a convex quadratic in each control.
constexpr ControlValue unconstrained_stationary_control(Strategy strategy, const EpiState& x,
                                                        const Costate& lambda,
                                                        const ObjectiveWeights& w) noexcept {
    switch (strategy) {
        case Strategy::vaccination: return {(lambda.s - lambda.r) * x.s / w.tau, 0.0};
        case Strategy::exposed_infected: return {(lambda.s - lambda.r) * x.s / w.nu, 0.0};
        case Strategy::treatment_education:
            return {(lambda.i - lambda.r) * x.i / w.b1, (lambda.s - lambda.r) * x.s / w.b2};
    }
    return {};
}

/// Minimiser of H over the box [0, u_max] (per control, since H separates).
constexpr ControlValue control_stationarity(Strategy strategy, const EpiState& x, const Costate& lambda,
                                            const ObjectiveWeights& w, double u_max) noexcept {
    const ControlValue u = unconstrained_stationary_control(strategy, x, lambda, w);
    return {std::clamp(u.u1, 0.0, u_max),
            control_count(strategy) == 2 ? std::clamp(u.u2, 0.0, u_max) : 0.0};
}

/// Starts from u = 0 and applies u <- (1 - omega) u + omega u*, where u* on
/// interval k minimises H with the switching function averaged over the two
/// interval endpoints.
inline OptimalSolution solve_fbsm(const OcpSpec& spec) {
    spec.validate();
    const SweepOptions& opt = spec.sweep;
    const std::size_t n = spec.grid.n_steps;
    const bool two = control_count(spec.strategy) == 2;

    OptimalSolution sol;
    sol.strategy = spec.strategy;
    ControlSchedule u(n);
    double update = 0.0;
    std::size_t sweep = 0;
    bool converged = false;

    while (sweep < opt.max_sweeps) {
        Trajectory fwd;
        try {
            fwd = simulate(spec, u);
        } catch (const IntegrationError& e) {
            throw SolverError(std::string("integration failure: ") + e.what(), sweep);
        }
        sol.convergence.objective_history.push_back(cost(spec.strategy, fwd, spec.weights));
        const AdjointTrajectory adj = integrate_adjoint_backward(spec.strategy, spec.params, fwd, spec.weights);

        update = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const ControlValue lo =
                unconstrained_stationary_control(spec.strategy, fwd.states[k], adj.costates[k], spec.weights);
            const ControlValue hi = unconstrained_stationary_control(spec.strategy, fwd.states[k + 1],
                                                                     adj.costates[k + 1], spec.weights);
            ControlValue target{std::clamp(0.5 * (lo.u1 + hi.u1), 0.0, spec.u_max),
                                two ? std::clamp(0.5 * (lo.u2 + hi.u2), 0.0, spec.u_max) : 0.0};
            ControlValue next{(1.0 - opt.relaxation) * u[k].u1 + opt.relaxation * target.u1,
                              (1.0 - opt.relaxation) * u[k].u2 + opt.relaxation * target.u2};
            // Convex combination of feasible values, re-clamped against rounding.
            next.u1 = std::clamp(next.u1, 0.0, spec.u_max);
            next.u2 = std::clamp(next.u2, 0.0, spec.u_max);
            update = std::max({update, std::abs(next.u1 - u[k].u1), std::abs(next.u2 - u[k].u2)});
            u[k] = next;
        }
        ++sweep;
        if (!std::isfinite(update)) throw SolverError("non-finite control update", sweep);
        if (update <= opt.tolerance) {
            converged = true;
            break;
        }
    }

    sol.controls = u;
    sol.trajectory = simulate(spec, u);
    sol.objective = cost(spec.strategy, sol.trajectory, spec.weights);
    sol.convergence.objective_history.push_back(sol.objective);
    sol.convergence.iterations = sweep;
    sol.convergence.final_gradient_norm = update;
    sol.convergence.converged = converged;
    return sol;
}

}  // namespace seirctl
