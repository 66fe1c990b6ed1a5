#pragma once

// Cost functionals J(u) evaluated on a sampled trajectory: composite
// trapezoid rule on the state samples, exact integral of the piecewise
// constant control term.

#include <stdexcept>

#include "seirctl/integrator.hpp"
#include "seirctl/running_cost.hpp"

namespace seirctl {

inline double cost(Strategy strategy, const Trajectory& traj, const ObjectiveWeights& weights) {
    if (!traj.controls) throw std::invalid_argument("cost functional requires a controlled trajectory");
    const std::size_t n = traj.grid.n_steps;
    if (traj.states.size() != n + 1 || traj.controls->size() != n) {
        throw std::invalid_argument("trajectory sample counts do not match its grid");
    }
    const double h = traj.grid.step();

    double state_part = 0.5 * (state_cost(strategy, weights, traj.states.front()) +
                               state_cost(strategy, weights, traj.states.back()));
    for (std::size_t k = 1; k < n; ++k) state_part += state_cost(strategy, weights, traj.states[k]);

    double control_part = 0.0;
    for (const ControlValue& u : *traj.controls) control_part += control_cost(strategy, weights, u);

    return h * (state_part + control_part);
}

/// int I + tau/2 u^2
inline double cost_strategy1(const Trajectory& traj, const ObjectiveWeights& weights) {
    return cost(Strategy::vaccination, traj, weights);
}

/// int A1 E + A2 I + nu/2 u^2
inline double cost_strategy2(const Trajectory& traj, const ObjectiveWeights& weights) {
    return cost(Strategy::exposed_infected, traj, weights);
}

/// int kappa I + B1/2 u1^2 + B2/2 u2^2
inline double cost_strategy3(const Trajectory& traj, const ObjectiveWeights& weights) {
    return cost(Strategy::treatment_education, traj, weights);
}

}  // namespace seirctl
