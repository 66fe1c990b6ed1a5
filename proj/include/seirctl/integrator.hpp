#pragma once

// Fixed-step classical Runge-Kutta integration of the SEIR vector fields
// (forward) and of the Pontryagin costate equations (backward).
//
// Controls are piecewise constant: the control of interval k is held for
// all four stage evaluations of step k.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seirctl/model.hpp"
#include "seirctl/running_cost.hpp"

namespace seirctl {

struct TimeGrid {
    double t0 = 0.0;
    double t_end = 100.0;
    std::size_t n_steps = 1000;

    void validate() const {
        if (!(t_end > t0)) throw std::invalid_argument("time grid requires t_end > t0");
        if (n_steps < 1) throw std::invalid_argument("time grid requires n_steps >= 1");
    }
    double step() const noexcept { return (t_end - t0) / static_cast<double>(n_steps); }
    double time(std::size_t k) const noexcept { return t0 + step() * static_cast<double>(k); }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

using ControlSchedule = std::vector<ControlValue>;

struct Trajectory {
    TimeGrid grid;
    std::vector<EpiState> states;                   // n_steps + 1 samples
    std::optional<ControlSchedule> controls;        // n_steps intervals

    const EpiState& final_state() const { return states.back(); }
};

/// Raised when a step produces a non-finite, negative, or non-conserving state.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, std::size_t step)
        : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// One classical RK4 step for any value type closed under + and scalar *.
template <typename State, typename Field>
State rk4_step(const State& x, double h, Field&& f) {
    const State k1 = f(x);
    const State k2 = f(x + (0.5 * h) * k1);
    const State k3 = f(x + (0.5 * h) * k2);
    const State k4 = f(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Integrates `field` from `init` over `grid`. `controls` is empty for the
/// uncontrolled field, otherwise it holds one value per interval.
inline Trajectory integrate(VectorField field, const ModelParams& params, const EpiState& init,
                            std::span<const ControlValue> controls, const TimeGrid& grid) {
    grid.validate();
    if (field == VectorField::uncontrolled) {
        if (!controls.empty()) throw std::invalid_argument("uncontrolled field takes no control schedule");
    } else if (controls.size() != grid.n_steps) {
        throw std::invalid_argument("control schedule length " + std::to_string(controls.size()) +
                                    " does not match n_steps " + std::to_string(grid.n_steps));
    }

    Trajectory traj{grid, {}, std::nullopt};
    traj.states.reserve(grid.n_steps + 1);
    traj.states.push_back(init);
    if (!controls.empty()) traj.controls.emplace(controls.begin(), controls.end());

    const double h = grid.step();
    const double mass = init.sum();
    EpiState x = init;
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const ControlValue u = controls.empty() ? ControlValue{} : controls[k];
        x = rk4_step(x, h, [&](const EpiState& y) { return rhs(field, y, params, u); });

        if (!is_finite(x)) throw IntegrationError("non-finite state", k + 1);
        if (x.s < -kStateTolerance || x.e < -kStateTolerance || x.i < -kStateTolerance ||
            x.r < -kStateTolerance) {
            throw IntegrationError("negative state component", k + 1);
        }
        if (std::abs(x.sum() - mass) > kStateTolerance * static_cast<double>(k + 1)) {
            throw IntegrationError("population not conserved", k + 1);
        }
        traj.states.push_back(x);
    }
    return traj;
}

inline Trajectory integrate_uncontrolled(const ModelParams& params, const EpiState& init,
                                         const TimeGrid& grid) {
    return integrate(VectorField::uncontrolled, params, init, {}, grid);
}

/// Costate (lambda_S, lambda_E, lambda_I, lambda_R).
struct Costate {
    double s = 0.0;
    double e = 0.0;
    double i = 0.0;
    double r = 0.0;

    Costate& operator+=(const Costate& o) noexcept {
        s += o.s;
        e += o.e;
        i += o.i;
        r += o.r;
        return *this;
    }
    friend Costate operator+(Costate a, const Costate& b) noexcept { return a += b; }
    friend Costate operator*(double k, const Costate& a) noexcept {
        return {k * a.s, k * a.e, k * a.i, k * a.r};
    }
    friend bool operator==(const Costate&, const Costate&) = default;
};

struct AdjointTrajectory {
    TimeGrid grid;
    std::vector<Costate> costates;  // n_steps + 1 samples, costates.back() is the terminal value
};

/// lambda' = -dH/dx with H = running cost + lambda . f(x, u).
inline Costate costate_rhs(Strategy strategy, const ModelParams& params, const ObjectiveWeights& weights,
                           const EpiState& x, const ControlValue& u, const Costate& lambda) {
    const EpiState ell = state_cost_gradient(strategy, weights);
    const StateJacobian J = state_jacobian(field_of(strategy), x, params, u);
    const EpiState jt = transpose_apply(J, {lambda.s, lambda.e, lambda.i, lambda.r});
    return {-(ell.s + jt.s), -(ell.e + jt.e), -(ell.i + jt.i), -(ell.r + jt.r)};
}

/// Integrates the costate equations from lambda(t_end) = 0 back to t0 on the
/// forward trajectory's grid. The state at the half step is the mean of the
/// two bracketing samples.
inline AdjointTrajectory integrate_adjoint_backward(Strategy strategy, const ModelParams& params,
                                                    const Trajectory& forward,
                                                    const ObjectiveWeights& weights) {
    const std::size_t n = forward.grid.n_steps;
    if (forward.states.size() != n + 1) throw std::invalid_argument("forward trajectory is incomplete");
    if (!forward.controls || forward.controls->size() != n) {
        throw std::invalid_argument("forward trajectory has no control schedule");
    }

    AdjointTrajectory adj{forward.grid, std::vector<Costate>(n + 1)};
    const double h = forward.grid.step();
    for (std::size_t k = n; k-- > 0;) {
        const ControlValue u = (*forward.controls)[k];
        const EpiState& x_hi = forward.states[k + 1];
        const EpiState& x_lo = forward.states[k];
        const EpiState x_mid = 0.5 * (x_hi + x_lo);
        auto F = [&](const EpiState& x, const Costate& l) {
            return costate_rhs(strategy, params, weights, x, u, l);
        };
        const Costate& l = adj.costates[k + 1];
        const Costate k1 = F(x_hi, l);
        const Costate k2 = F(x_mid, l + (-0.5 * h) * k1);
        const Costate k3 = F(x_mid, l + (-0.5 * h) * k2);
        const Costate k4 = F(x_lo, l + (-h) * k3);
        const Costate next = l + (-h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(next.s) || !std::isfinite(next.e) || !std::isfinite(next.i) ||
            !std::isfinite(next.r)) {
            throw IntegrationError("non-finite costate", k);
        }
        adj.costates[k] = next;
    }
    return adj;
}

}  // namespace seirctl
