#ifndef CSTRBIO_DYNAMICS_HPP
#define CSTRBIO_DYNAMICS_HPP

/**
 * @file dynamics.hpp
 * @brief Time integration of the coupled reactor system.
 *
 * State X = (h, S, Q): biofilm thickness, bulk substrate, suspended biomass.
 * Each right-hand-side evaluation solves the substrate profile u[h,S] and
 * assembles
 *
 *   h' = h int_0^1 g(r(u)) dy + (alpha/beta) Q - d(h) h
 *   S' = D (S* - S) - k1 Q nu(S) - (rho h / kappa) int_0^1 r(u) dy
 *   Q' = (nu(S) - k2) Q + beta d(h) h - alpha Q
 *
 * Integration is adaptive embedded Runge-Kutta 5(4) with nonnegativity
 * guards and runtime monitors for the a-priori bounds the solution theory
 * guarantees (S below max{S0, S*}; a weighted total-mass functional).
 */

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "cstrbio/kinetics.hpp"
#include "cstrbio/substrate_bvp.hpp"

namespace cstrbio {

struct ReactorState {
    double t = 0.0;
    double h = 0.0;
    double S = 0.0;
    double Q = 0.0;
};

struct TrajectorySample {
    double t = 0.0;
    double h = 0.0, S = 0.0, Q = 0.0;
    double u0 = 0.0;    ///< substrate at the wall, u[h,S](0)
    double flux = 0.0;  ///< (rho h / kappa) int r(u) dy, the uptake in S'
};

struct MonitorLog {
    long accepted_steps = 0;
    long rejected_steps = 0;       ///< error-control and negativity rejections
    long negativity_rejections = 0;
    long clamped_components = 0;   ///< tiny negative values snapped to 0
    double worst_pre_clamp = 0.0;  ///< most negative component seen pre-clamp
    double max_S_excess = 0.0;     ///< max (S(t) - max{S0, S*}) along the run
    double max_bound_excess = 0.0; ///< max (V(t) - bound) of the mass functional
    bool bound_monitor_applicable = false;
    std::vector<std::string> violations;  ///< recorded alarms, empty when clean
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    MonitorLog monitor;
    bool completed = false;
    std::string failure_reason;  ///< set when completed == false
};

struct IntegrateOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double sample_dt = 0.1;
    long max_steps = 50'000'000;
    BvpOptions bvp{};
};

/// Right-hand side f(X) at a nonnegative state, from a freshly solved
/// profile. Throws std::domain_error on negative components; BVP solver
/// failures propagate.
Eigen::Vector3d rhs(const ReactorState& state, const KineticsSet& kin,
                    const ModelParams& params, const BvpOptions& opts = {});

/// Integrate from `initial` to t_end, sampling every sample_dt (plus t_end).
/// A step producing a component below -1e-9 is rejected and halved; smaller
/// undershoots are clamped to 0 and logged. On solver failure the partial
/// trajectory is returned with completed == false.
Trajectory integrate(const ReactorState& initial, double t_end, const KineticsSet& kin,
                     const ModelParams& params, const IntegrateOptions& opts = {});

/// Constants and verdict of the weighted-mass boundedness check
/// V(t) = eta h + Q + S/k1 <= max{V(0), ((g0+1) eta h1 + D S*/k1)/delta}.
struct BoundReport {
    bool applicable = false;  ///< requires unbounded detachment (linear d)
    double eta = 0.0, eta0 = 0.0, eta1 = 0.0;
    double g0 = 0.0, h1 = 0.0, delta = 0.0;
    double bound = 0.0;           ///< right-hand side incl. the V(0) max
    double max_functional = 0.0;  ///< max V(t) over the trajectory
    double worst_excess = 0.0;    ///< max_functional - bound
    bool holds = false;
};

BoundReport orbit_bound_monitor(const Trajectory& traj, const KineticsSet& kin,
                                const ModelParams& params);

enum class LimitKind { Washout, Nontrivial, Undecided };

struct LimitClassification {
    LimitKind kind = LimitKind::Undecided;
    Eigen::Vector3d point{0.0, 0.0, 0.0};  ///< limit point for Nontrivial / Washout
};

/// Classify the tail of a trajectory: Washout if the last `window` time units
/// stay within tol of (0, S*, 0); Nontrivial if they stay within tol of their
/// own mean and the mean thickness exceeds tol; otherwise Undecided.
LimitClassification classify_limit(const Trajectory& traj, double window, double tol,
                                   const ModelParams& params);

} // namespace cstrbio

#endif
