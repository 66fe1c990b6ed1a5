#pragma once

// Optimal-control problem description and solution record shared by the
// direct and the forward-backward sweep solvers.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seirctl/integrator.hpp"
#include "seirctl/objectives.hpp"

namespace seirctl {

struct DirectOptions {
    std::size_t max_iterations = 500;
    double tolerance = 1e-6;               // on the projected-gradient infinity norm
    std::optional<double> initial_guess;   // extra constant start, tried first
    double initial_step = 1.0;
    double shrink = 0.5;
    double armijo = 1e-4;
    bool parallel_starts = true;
};

struct SweepOptions {
    std::size_t max_sweeps = 2000;
    double tolerance = 1e-6;  // on the control update infinity norm
    double relaxation = 0.5;  // weight of the new stationary control
};

struct OcpSpec {
    Strategy strategy = Strategy::vaccination;
    ModelParams params = ModelParams::canonical();
    EpiState init = EpiState::canonical();
    ObjectiveWeights weights{};
    double u_max = 0.9;
    TimeGrid grid{};
    DirectOptions direct{};
    SweepOptions sweep{};

    static OcpSpec canonical(Strategy strategy) {
        OcpSpec spec;
        spec.strategy = strategy;
        return spec;
    }

    void validate() const {
        grid.validate();
        if (std::abs(grid.t_end - grid.t0 - params.t_end()) > 1e-12 * params.t_end()) {
            throw std::invalid_argument("grid span must equal the model horizon t_end");
        }
        validate_state(init);
        validate_weights(strategy, weights);
        if (!(u_max > 0.0 && u_max <= 1.0)) throw std::invalid_argument("u_max must lie in (0, 1]");
        if (!(direct.tolerance > 0.0) || !(sweep.tolerance > 0.0)) {
            throw std::invalid_argument("solver tolerances must be > 0");
        }
        if (!(sweep.relaxation > 0.0 && sweep.relaxation <= 1.0)) {
            throw std::invalid_argument("sweep relaxation must lie in (0, 1]");
        }
        if (direct.initial_guess && !std::isfinite(*direct.initial_guess)) {
            throw std::invalid_argument("initial guess must be finite");
        }
    }

    std::size_t variable_count() const noexcept {
        return grid.n_steps * static_cast<std::size_t>(control_count(strategy));
    }
};

struct ConvergenceRecord {
    std::size_t iterations = 0;
    /// Direct: projected-gradient infinity norm. Sweep: last control update infinity norm.
    double final_gradient_norm = 0.0;
    bool converged = false;
    std::vector<double> objective_history;  // one entry per accepted iterate, starting point first
};

struct OptimalSolution {
    Strategy strategy = Strategy::vaccination;
    ControlSchedule controls;
    Trajectory trajectory;
    double objective = 0.0;
    ConvergenceRecord convergence;
};

/// Raised when a solver cannot produce a finite objective.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::size_t iteration)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// Flat decision vector: u1 over all intervals, then u2 (two-control strategy only).
inline std::vector<double> pack_controls(Strategy strategy, const ControlSchedule& schedule) {
    const std::size_t n = schedule.size();
    std::vector<double> v(n * static_cast<std::size_t>(control_count(strategy)));
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = schedule[k].u1;
        if (control_count(strategy) == 2) v[n + k] = schedule[k].u2;
    }
    return v;
}

inline ControlSchedule unpack_controls(Strategy strategy, std::span<const double> v) {
    const std::size_t m = static_cast<std::size_t>(control_count(strategy));
    if (v.size() % m != 0) throw std::invalid_argument("decision vector length mismatch");
    const std::size_t n = v.size() / m;
    ControlSchedule schedule(n);
    for (std::size_t k = 0; k < n; ++k) {
        schedule[k].u1 = v[k];
        if (m == 2) schedule[k].u2 = v[n + k];
    }
    return schedule;
}

inline Trajectory simulate(const OcpSpec& spec, const ControlSchedule& schedule) {
    return integrate(field_of(spec.strategy), spec.params, spec.init, schedule, spec.grid);
}

inline double evaluate_objective(const OcpSpec& spec, const ControlSchedule& schedule) {
    return cost(spec.strategy, simulate(spec, schedule), spec.weights);
}

}  // namespace seirctl
