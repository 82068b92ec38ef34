#ifndef CSTRBIO_IO_HPP
#define CSTRBIO_IO_HPP

#include <string>
#include <vector>

#include "cstrbio/dynamics.hpp"

namespace cstrbio {

/// Write `contents` to `path` atomically (temp file + rename).
void atomic_write_file(const std::string& path, const std::string& contents);

/// Trajectory CSV: header exactly `t,h,S,Q,u0,flux`, values %.12g, LF endings.
std::string trajectory_csv(const Trajectory& traj);

struct SweepRow {
    double sstar = 0.0;
    bool found = false;
    double h_star = 0.0, S_star = 0.0, Q_star = 0.0;
    double lambda_plus_washout = 0.0;
    std::string verdict;
};

/// Sweep CSV: header exactly `sstar,found,h_star,S_star,Q_star,lambda_plus_washout,verdict`.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Static SVG: three stacked 800x600 panels (h, S, Q against t), one polyline
/// per trajectory, optional dashed guide lines at a known equilibrium.
std::string trajectory_svg(const std::vector<Trajectory>& trajectories,
                           const double* equilibrium_hsq);

} // namespace cstrbio

#endif
