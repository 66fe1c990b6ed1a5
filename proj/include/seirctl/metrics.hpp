#pragma once

// Headline quantities of an epidemic curve (peaks, final state, how long a
// compartment stays above a threshold) and pairwise comparison of runs.

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seirctl/integrator.hpp"

namespace seirctl {

inline constexpr double kDefaultThreshold = 0.01;

struct Peak {
    std::size_t index = 0;
    double time = 0.0;
    double value = 0.0;
};

/// Last grid time at which the curve is >= threshold (0 if never).
/// `reached` is false when the curve is still >= threshold at t_end.
struct Period {
    double days = 0.0;
    bool reached = true;

    /// Unreached periods compare as +infinity.
    double ordering_key() const noexcept { return reached ? days : std::numeric_limits<double>::infinity(); }
};

struct SummaryMetrics {
    Peak peak_infected;
    Peak peak_exposed;
    EpiState final_state;
    Period infection_period;
    Period exposure_period;
    std::optional<double> objective;
};

namespace detail {

template <typename Get>
Peak curve_peak(const Trajectory& traj, Get get) {
    Peak p{0, traj.grid.time(0), get(traj.states[0])};
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
        const double v = get(traj.states[k]);
        if (v > p.value) p = {k, traj.grid.time(k), v};
    }
    return p;
}

template <typename Get>
Period curve_period(const Trajectory& traj, double threshold, Get get) {
    const std::size_t n = traj.states.size();
    for (std::size_t k = n; k-- > 0;) {
        if (get(traj.states[k]) >= threshold) return {traj.grid.time(k), k + 1 != n};
    }
    return {0.0, true};
}

}  // namespace detail

inline SummaryMetrics summarize(const Trajectory& traj, double threshold = kDefaultThreshold,
                                std::optional<double> objective = std::nullopt) {
    if (traj.states.empty()) throw std::invalid_argument("cannot summarize an empty trajectory");
    auto infected = [](const EpiState& x) { return x.i; };
    auto exposed = [](const EpiState& x) { return x.e; };
    return {detail::curve_peak(traj, infected),
            detail::curve_peak(traj, exposed),
            traj.states.back(),
            detail::curve_period(traj, threshold, infected),
            detail::curve_period(traj, threshold, exposed),
            objective};
}

/// Which of two runs is better on a criterion.
enum class Ordering { first, second, tie };

inline const char* to_string(Ordering o) noexcept {
    switch (o) {
        case Ordering::first: return "first";
        case Ordering::second: return "second";
        case Ordering::tie: return "tie";
    }
    return "?";
}

struct PairwiseOrdering {
    std::string first;
    std::string second;
    Ordering lower_peak_infected = Ordering::tie;
    Ordering shorter_infection_period = Ordering::tie;
    Ordering higher_final_recovered = Ordering::tie;
};

struct ComparisonReport {
    std::vector<std::pair<std::string, SummaryMetrics>> runs;
    std::vector<PairwiseOrdering> pairs;  // every (a, b) with a listed before b
};

namespace detail {

inline Ordering smaller(double a, double b) noexcept {
    if (a < b) return Ordering::first;
    if (b < a) return Ordering::second;
    return Ordering::tie;
}

}  // namespace detail

inline ComparisonReport compare(std::vector<std::pair<std::string, SummaryMetrics>> runs) {
    if (runs.size() < 2) throw std::invalid_argument("comparison needs at least two runs");
    ComparisonReport report;
    for (std::size_t a = 0; a < runs.size(); ++a) {
        for (std::size_t b = a + 1; b < runs.size(); ++b) {
            const SummaryMetrics& x = runs[a].second;
            const SummaryMetrics& y = runs[b].second;
            report.pairs.push_back({runs[a].first, runs[b].first,
                                    detail::smaller(x.peak_infected.value, y.peak_infected.value),
                                    detail::smaller(x.infection_period.ordering_key(),
                                                    y.infection_period.ordering_key()),
                                    detail::smaller(-x.final_state.r, -y.final_state.r)});
        }
    }
    report.runs = std::move(runs);
    return report;
}

}  // namespace seirctl
