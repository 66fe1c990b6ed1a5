#pragma once

// Pointwise integrands of the three cost functionals, split into the
// state part and the control part.

#include <stdexcept>
#include <string>

#include "seirctl/model.hpp"

namespace seirctl {

/// Weights of all three functionals. Only the ones belonging to the
/// strategy in use are read.
struct ObjectiveWeights {
    double tau = 1.0;    // strategy 1, control
    double a1 = 1.0;     // strategy 2, exposed
    double a2 = 1.0;     // strategy 2, infected
    double nu = 1.0;     // strategy 2, control
    double kappa = 1.0;  // strategy 3, infected
    double b1 = 1.0;     // strategy 3, treatment
    double b2 = 1.0;     // strategy 3, education

    friend bool operator==(const ObjectiveWeights&, const ObjectiveWeights&) = default;
};

inline void validate_weights(Strategy strategy, const ObjectiveWeights& w) {
    auto require = [](double v, const char* name) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
    };
    switch (strategy) {
        case Strategy::vaccination: require(w.tau, "tau"); break;
        case Strategy::exposed_infected:
            require(w.a1, "a1");
            require(w.a2, "a2");
            require(w.nu, "nu");
            break;
        case Strategy::treatment_education:
            require(w.kappa, "kappa");
            require(w.b1, "b1");
            require(w.b2, "b2");
            break;
    }
}

/// Gradient of the state part of the integrand. The state part is linear,
/// so this is also its coefficient vector.
constexpr EpiState state_cost_gradient(Strategy strategy, const ObjectiveWeights& w) noexcept {
    switch (strategy) {
        case Strategy::vaccination: return {0.0, 0.0, 1.0, 0.0};
        case Strategy::exposed_infected: return {0.0, w.a1, w.a2, 0.0};
        case Strategy::treatment_education: return {0.0, 0.0, w.kappa, 0.0};
    }
    return {};
}

constexpr double state_cost(Strategy strategy, const ObjectiveWeights& w, const EpiState& x) noexcept {
    return dot(state_cost_gradient(strategy, w), x);
}

constexpr double control_cost(Strategy strategy, const ObjectiveWeights& w, const ControlValue& u) noexcept {
    switch (strategy) {
        case Strategy::vaccination: return 0.5 * w.tau * u.u1 * u.u1;
        case Strategy::exposed_infected: return 0.5 * w.nu * u.u1 * u.u1;
        case Strategy::treatment_education: return 0.5 * (w.b1 * u.u1 * u.u1 + w.b2 * u.u2 * u.u2);
    }
    return 0.0;
}

/// d(control_cost)/du, (u1, u2) components.
constexpr ControlValue control_cost_gradient(Strategy strategy, const ObjectiveWeights& w,
                                             const ControlValue& u) noexcept {
    switch (strategy) {
        case Strategy::vaccination: return {w.tau * u.u1, 0.0};
        case Strategy::exposed_infected: return {w.nu * u.u1, 0.0};
        case Strategy::treatment_education: return {w.b1 * u.u1, w.b2 * u.u2};
    }
    return {};
}

}  // namespace seirctl
