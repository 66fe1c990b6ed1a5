#pragma once

// SEIR state, parameters, and the three vector fields (uncontrolled,
// vaccination, treatment + education). Populations are fractions of a
// constant total normalised to 1.

#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace seirctl {

/// Tolerance used everywhere a population sum or sign is checked.
inline constexpr double kStateTolerance = 1e-9;

/// Normalised total population.
inline constexpr double kTotalPopulation = 1.0;

/// Epidemiological rates (1/day) and program horizon (days).
/// Validated once at construction so the vector fields never re-check.
class ModelParams {
public:
    ModelParams(double beta, double gamma, double mu, double t_end)
        : beta_(beta), gamma_(gamma), mu_(mu), t_end_(t_end) {
        require_positive(beta, "beta");
        require_positive(gamma, "gamma");
        require_positive(mu, "mu");
        require_positive(t_end, "t_end");
    }

    /// beta = 0.2, gamma = 0.1887, mu = 0.1 over a 100-day horizon.
    static ModelParams canonical() { return {0.2, 0.1887, 0.1, 100.0}; }

    constexpr double beta() const noexcept { return beta_; }
    constexpr double gamma() const noexcept { return gamma_; }
    constexpr double mu() const noexcept { return mu_; }
    constexpr double t_end() const noexcept { return t_end_; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    static void require_positive(double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string(name) + " must be a finite value > 0");
        }
    }

    double beta_;
    double gamma_;
    double mu_;
    double t_end_;
};

/// One (S, E, I, R) sample. Also used for derivatives, which is why it
/// carries vector-space arithmetic.
struct EpiState {
    double s = 0.0;
    double e = 0.0;
    double i = 0.0;
    double r = 0.0;

    /// (0.88, 0.07, 0.05, 0)
    static constexpr EpiState canonical() { return {0.88, 0.07, 0.05, 0.0}; }

    constexpr double sum() const noexcept { return s + e + i + r; }

    constexpr std::array<double, 4> as_array() const noexcept { return {s, e, i, r}; }

    constexpr EpiState& operator+=(const EpiState& o) noexcept {
        s += o.s;
        e += o.e;
        i += o.i;
        r += o.r;
        return *this;
    }
    friend constexpr EpiState operator+(EpiState a, const EpiState& b) noexcept { return a += b; }
    friend constexpr EpiState operator*(double k, const EpiState& a) noexcept {
        return {k * a.s, k * a.e, k * a.i, k * a.r};
    }
    friend constexpr bool operator==(const EpiState&, const EpiState&) = default;
};

using EpiStateDerivative = EpiState;

inline bool is_finite(const EpiState& x) noexcept {
    return std::isfinite(x.s) && std::isfinite(x.e) && std::isfinite(x.i) && std::isfinite(x.r);
}

/// Throws std::invalid_argument unless every component is >= 0 and the
/// components sum to the normalised population.
inline void validate_state(const EpiState& x) {
    if (!is_finite(x)) throw std::invalid_argument("initial state must be finite");
    if (x.s < 0.0 || x.e < 0.0 || x.i < 0.0 || x.r < 0.0) {
        throw std::invalid_argument("initial state components must be >= 0");
    }
    if (std::abs(x.sum() - kTotalPopulation) > kStateTolerance) {
        throw std::invalid_argument("initial state must satisfy S + E + I + R = 1 (conservation)");
    }
}

/// u1 is vaccination for the single-control system and treatment for the
/// two-control system; u2 is the education rate (two-control system only).
struct ControlValue {
    double u1 = 0.0;
    double u2 = 0.0;

    friend constexpr bool operator==(const ControlValue&, const ControlValue&) = default;
};

/// Which right-hand side drives the dynamics.
enum class VectorField { uncontrolled, vaccination, two_controls };

/// Optimal-control problem variant.
///   vaccination:         min  int I + tau/2 u^2
///   exposed_infected:    min  int A1 E + A2 I + nu/2 u^2
///   treatment_education: min  int kappa I + B1/2 u1^2 + B2/2 u2^2
enum class Strategy { vaccination = 1, exposed_infected = 2, treatment_education = 3 };

constexpr VectorField field_of(Strategy s) noexcept {
    return s == Strategy::treatment_education ? VectorField::two_controls : VectorField::vaccination;
}

constexpr int control_count(Strategy s) noexcept {
    return s == Strategy::treatment_education ? 2 : 1;
}

inline Strategy strategy_from_int(int k) {
    if (k < 1 || k > 3) throw std::invalid_argument("strategy must be 1, 2 or 3");
    return static_cast<Strategy>(k);
}

constexpr int to_int(Strategy s) noexcept { return static_cast<int>(s); }

inline std::ostream& operator<<(std::ostream& out, Strategy s) { return out << "strategy" << to_int(s); }

constexpr EpiStateDerivative rhs_uncontrolled(const EpiState& x, const ModelParams& p) noexcept {
    const double infection = p.beta() * x.s * x.i;
    const double onset = p.gamma() * x.e;
    const double recovery = p.mu() * x.i;
    return {-infection, infection - onset, onset - recovery, recovery};
}

/// Vaccination moves u1 * S per day straight from S to R. u2 is ignored.
constexpr EpiStateDerivative rhs_vaccination(const EpiState& x, const ModelParams& p,
                                             const ControlValue& u) noexcept {
    const double infection = p.beta() * x.s * x.i;
    const double onset = p.gamma() * x.e;
    const double recovery = p.mu() * x.i;
    const double vaccinated = u.u1 * x.s;
    return {-infection - vaccinated, infection - onset, onset - recovery, recovery + vaccinated};
}

/// Treatment (u1) moves I to R; education (u2) moves S to R.
constexpr EpiStateDerivative rhs_two_controls(const EpiState& x, const ModelParams& p,
                                              const ControlValue& u) noexcept {
    const double infection = p.beta() * x.s * x.i;
    const double onset = p.gamma() * x.e;
    const double recovery = p.mu() * x.i;
    const double treated = u.u1 * x.i;
    const double educated = u.u2 * x.s;
    return {-infection - educated, infection - onset, onset - recovery - treated,
            recovery + treated + educated};
}

constexpr EpiStateDerivative rhs(VectorField field, const EpiState& x, const ModelParams& p,
                                 const ControlValue& u) noexcept {
    switch (field) {
        case VectorField::vaccination: return rhs_vaccination(x, p, u);
        case VectorField::two_controls: return rhs_two_controls(x, p, u);
        case VectorField::uncontrolled: break;
    }
    return rhs_uncontrolled(x, p);
}

/// Row-major 4x4 state Jacobian, rows are (dS, dE, dI, dR).
using StateJacobian = std::array<std::array<double, 4>, 4>;

/// Partial derivatives of the field with respect to (u1, u2), one column each.
struct ControlJacobian {
    EpiState du1;
    EpiState du2;
};

constexpr StateJacobian state_jacobian(VectorField field, const EpiState& x, const ModelParams& p,
                                       const ControlValue& u) noexcept {
    const double b = p.beta(), g = p.gamma(), m = p.mu();
    StateJacobian J{{{-b * x.i, 0.0, -b * x.s, 0.0},
                     {b * x.i, -g, b * x.s, 0.0},
                     {0.0, g, -m, 0.0},
                     {0.0, 0.0, m, 0.0}}};
    if (field == VectorField::vaccination) {
        J[0][0] -= u.u1;
        J[3][0] += u.u1;
    } else if (field == VectorField::two_controls) {
        J[0][0] -= u.u2;
        J[3][0] += u.u2;
        J[2][2] -= u.u1;
        J[3][2] += u.u1;
    }
    return J;
}

constexpr ControlJacobian control_jacobian(VectorField field, const EpiState& x) noexcept {
    switch (field) {
        case VectorField::vaccination: return {{-x.s, 0.0, 0.0, x.s}, {}};
        case VectorField::two_controls: return {{0.0, 0.0, -x.i, x.i}, {-x.s, 0.0, 0.0, x.s}};
        case VectorField::uncontrolled: break;
    }
    return {};
}

/// J^T v for a state Jacobian.
constexpr EpiState transpose_apply(const StateJacobian& J, const EpiState& v) noexcept {
    const auto a = v.as_array();
    std::array<double, 4> out{};
    for (std::size_t c = 0; c < 4; ++c) {
        for (std::size_t r = 0; r < 4; ++r) out[c] += J[r][c] * a[r];
    }
    return {out[0], out[1], out[2], out[3]};
}

constexpr double dot(const EpiState& a, const EpiState& b) noexcept {
    return a.s * b.s + a.e * b.e + a.i * b.i + a.r * b.r;
}

}  // namespace seirctl
