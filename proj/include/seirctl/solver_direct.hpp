#pragma once

// Direct solver: the control is piecewise constant on the integration grid,
// the objective is the discretised functional, and its exact gradient comes
// from reverse-mode differentiation of the RK4 recursion (discrete adjoint).
// Box bounds are handled by projected gradient descent with an Armijo
// backtracking search along the projection arc, restarted from several
// constant schedules.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <span>
#include <vector>

#include "seirctl/problem.hpp"

namespace seirctl {

inline std::vector<double> project_controls(std::span<const double> raw, double u_max) {
    std::vector<double> out(raw.size());
    std::transform(raw.begin(), raw.end(), out.begin(), [u_max](double v) { return std::clamp(v, 0.0, u_max); });
    return out;
}

inline ControlSchedule project_controls(const ControlSchedule& raw, double u_max) {
    ControlSchedule out(raw);
    for (ControlValue& u : out) {
        u.u1 = std::clamp(u.u1, 0.0, u_max);
        u.u2 = std::clamp(u.u2, 0.0, u_max);
    }
    return out;
}

namespace detail {

struct StepSensitivity {
    EpiState wrt_state;
    ControlValue wrt_control;
};

/// Pulls `bar` (sensitivity of the objective to the state after the step)
/// back through one RK4 step taken from `x` under control `u`.
inline StepSensitivity rk4_pullback(VectorField field, const ModelParams& p, const EpiState& x,
                                    const ControlValue& u, double h, const EpiState& bar) {
    auto f = [&](const EpiState& y) { return rhs(field, y, p, u); };
    const EpiState k1 = f(x);
    const EpiState x2 = x + (0.5 * h) * k1;
    const EpiState k2 = f(x2);
    const EpiState x3 = x + (0.5 * h) * k2;
    const EpiState k3 = f(x3);
    const EpiState x4 = x + h * k3;

    StepSensitivity out{bar, {}};
    auto stage = [&](const EpiState& at, const EpiState& bar_k) {
        const ControlJacobian cj = control_jacobian(field, at);
        out.wrt_control.u1 += dot(cj.du1, bar_k);
        out.wrt_control.u2 += dot(cj.du2, bar_k);
        return transpose_apply(state_jacobian(field, at, p, u), bar_k);
    };

    EpiState bar_k3 = (h / 3.0) * bar;
    EpiState bar_k2 = (h / 3.0) * bar;
    EpiState bar_k1 = (h / 6.0) * bar;

    const EpiState bar_x4 = stage(x4, (h / 6.0) * bar);
    out.wrt_state += bar_x4;
    bar_k3 += h * bar_x4;

    const EpiState bar_x3 = stage(x3, bar_k3);
    out.wrt_state += bar_x3;
    bar_k2 += (0.5 * h) * bar_x3;

    const EpiState bar_x2 = stage(x2, bar_k2);
    out.wrt_state += bar_x2;
    bar_k1 += (0.5 * h) * bar_x2;

    out.wrt_state += stage(x, bar_k1);
    return out;
}

}  // namespace detail

/// Gradient of the discretised objective with respect to the packed control
/// vector, given the forward trajectory under `schedule`.
inline std::vector<double> objective_gradient(const OcpSpec& spec, const Trajectory& forward) {
    const ControlSchedule& schedule = forward.controls.value();
    const std::size_t n = spec.grid.n_steps;
    const double h = spec.grid.step();
    const VectorField field = field_of(spec.strategy);
    const EpiState ell = state_cost_gradient(spec.strategy, spec.weights);
    const bool two = control_count(spec.strategy) == 2;

    std::vector<double> grad(spec.variable_count());
    EpiState bar = (0.5 * h) * ell;
    for (std::size_t k = n; k-- > 0;) {
        const auto sens = detail::rk4_pullback(field, spec.params, forward.states[k], schedule[k], h, bar);
        const ControlValue dc = control_cost_gradient(spec.strategy, spec.weights, schedule[k]);
        grad[k] = h * dc.u1 + sens.wrt_control.u1;
        if (two) grad[n + k] = h * dc.u2 + sens.wrt_control.u2;
        bar = sens.wrt_state + ((k == 0 ? 0.5 : 1.0) * h) * ell;
    }
    return grad;
}

inline std::vector<double> objective_gradient(const OcpSpec& spec, const ControlSchedule& schedule) {
    return objective_gradient(spec, simulate(spec, schedule));
}

/// Infinity norm of u - P(u - g/h): the projected gradient measured in the
/// L2 metric of piecewise-constant controls, so that it does not shrink
/// with the step size.
inline double projected_gradient_norm(std::span<const double> u, std::span<const double> grad, double h,
                                      double u_max) {
    double norm = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double moved = std::clamp(u[j] - grad[j] / h, 0.0, u_max);
        norm = std::max(norm, std::abs(moved - u[j]));
    }
    return norm;
}

namespace detail {

inline OptimalSolution descend_from(const OcpSpec& spec, std::vector<double> u) {
    const DirectOptions& opt = spec.direct;
    const double h = spec.grid.step();
    const Strategy strategy = spec.strategy;

    OptimalSolution sol;
    sol.strategy = strategy;
    Trajectory traj = simulate(spec, unpack_controls(strategy, u));
    double J = cost(strategy, traj, spec.weights);
    if (!std::isfinite(J)) throw SolverError("non-finite objective", 0);
    sol.convergence.objective_history.push_back(J);

    std::size_t it = 0;
    double measure = std::numeric_limits<double>::infinity();
    for (;; ++it) {
        const std::vector<double> grad = objective_gradient(spec, traj);
        measure = projected_gradient_norm(u, grad, h, spec.u_max);
        if (measure <= opt.tolerance || it >= opt.max_iterations) break;

        // Backtrack along the projection arc P(u - step * g / h).
        double step = opt.initial_step;
        bool accepted = false;
        std::vector<double> trial(u.size());
        while (step > 1e-14) {
            double decrease = 0.0;
            for (std::size_t j = 0; j < u.size(); ++j) {
                trial[j] = std::clamp(u[j] - step * grad[j] / h, 0.0, spec.u_max);
                decrease += grad[j] * (trial[j] - u[j]);
            }
            Trajectory trial_traj;
            try {
                trial_traj = simulate(spec, unpack_controls(strategy, trial));
            } catch (const IntegrationError& e) {
                throw SolverError(std::string("integration failure in line search: ") + e.what(), it);
            }
            const double trial_J = cost(strategy, trial_traj, spec.weights);
            if (!std::isfinite(trial_J)) throw SolverError("non-finite objective in line search", it);
            if (trial_J <= J + opt.armijo * decrease) {
                u.swap(trial);
                traj = std::move(trial_traj);
                J = trial_J;
                accepted = true;
                break;
            }
            step *= opt.shrink;
        }
        if (!accepted) break;  // stalled: no step length gives sufficient decrease
        sol.convergence.objective_history.push_back(J);
    }

    sol.convergence.iterations = it;
    sol.convergence.final_gradient_norm = measure;
    sol.convergence.converged = measure <= opt.tolerance;
    sol.controls = unpack_controls(strategy, u);
    sol.trajectory = std::move(traj);
    sol.objective = J;
    return sol;
}

}  // namespace detail

/// Multi-start projected gradient descent. Starts: the optional user guess,
/// then u = 0, u = u_max / 2, u = u_max. The lowest objective wins; the first
/// start wins exact ties.
inline OptimalSolution solve_direct(const OcpSpec& spec) {
    spec.validate();
    std::vector<double> levels;
    if (spec.direct.initial_guess) levels.push_back(*spec.direct.initial_guess);
    levels.insert(levels.end(), {0.0, 0.5 * spec.u_max, spec.u_max});

    const std::size_t m = spec.variable_count();
    auto start = [&](double level) {
        return detail::descend_from(spec, project_controls(std::vector<double>(m, level), spec.u_max));
    };

    std::vector<OptimalSolution> runs;
    if (spec.direct.parallel_starts) {
        std::vector<std::future<OptimalSolution>> pending;
        for (double level : levels) pending.push_back(std::async(std::launch::async, start, level));
        for (auto& f : pending) runs.push_back(f.get());
    } else {
        for (double level : levels) runs.push_back(start(level));
    }

    std::size_t best = 0;
    for (std::size_t j = 1; j < runs.size(); ++j) {
        if (runs[j].objective < runs[best].objective) best = j;
    }
    return std::move(runs[best]);
}

}  // namespace seirctl
