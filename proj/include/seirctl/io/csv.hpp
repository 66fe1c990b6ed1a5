#pragma once

// Trajectory CSV: header `t,S,E,I,R` (plus `,u1,u2` when controlled), one
// row per grid sample, 12 significant digits, LF line endings. Row k holds
// the control of interval [t_k, t_k+1); the last row repeats the final
// interval's control.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "seirctl/integrator.hpp"
#include "seirctl/problem.hpp"

namespace seirctl::io {

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    const bool controlled = traj.controls.has_value() && !traj.controls->empty();
    out << (controlled ? "t,S,E,I,R,u1,u2\n" : "t,S,E,I,R\n");
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const EpiState& x = traj.states[k];
        out << format_number(traj.grid.time(k)) << ',' << format_number(x.s) << ',' << format_number(x.e)
            << ',' << format_number(x.i) << ',' << format_number(x.r);
        if (controlled) {
            const ControlValue& u = (*traj.controls)[std::min(k, traj.controls->size() - 1)];
            out << ',' << format_number(u.u1) << ',' << format_number(u.u2);
        }
        out << '\n';
    }
}

inline Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trajectory CSV is empty");
    bool controlled = false;
    if (line == "t,S,E,I,R,u1,u2") controlled = true;
    else if (line != "t,S,E,I,R") throw std::runtime_error("unexpected trajectory CSV header: " + line);

    std::vector<double> times;
    Trajectory traj;
    ControlSchedule controls;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                cells.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw std::runtime_error("row " + std::to_string(row) + ": bad number '" + cell + "'");
            }
        }
        if (cells.size() != (controlled ? 7u : 5u)) {
            throw std::runtime_error("row " + std::to_string(row) + ": wrong column count");
        }
        times.push_back(cells[0]);
        traj.states.push_back({cells[1], cells[2], cells[3], cells[4]});
        if (controlled) controls.push_back({cells[5], cells[6]});
    }
    if (times.size() < 2) throw std::runtime_error("trajectory CSV needs at least two rows");
    traj.grid = {times.front(), times.back(), times.size() - 1};
    if (controlled) {
        controls.pop_back();
        traj.controls = std::move(controls);
    }
    return traj;
}

/// Control schedule: `t,u1,u2` with t the start of each interval.
inline void write_controls_csv(std::ostream& out, const TimeGrid& grid, const ControlSchedule& controls) {
    out << "t,u1,u2\n";
    for (std::size_t k = 0; k < controls.size(); ++k) {
        out << format_number(grid.time(k)) << ',' << format_number(controls[k].u1) << ','
            << format_number(controls[k].u2) << '\n';
    }
}

/// Objective after every accepted iterate.
inline void write_convergence_csv(std::ostream& out, const ConvergenceRecord& rec) {
    out << "iteration,objective\n";
    for (std::size_t k = 0; k < rec.objective_history.size(); ++k) {
        out << k << ',' << format_number(rec.objective_history[k]) << '\n';
    }
}

/// Opens `path` for writing in binary mode so line endings stay LF.
inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace seirctl::io
