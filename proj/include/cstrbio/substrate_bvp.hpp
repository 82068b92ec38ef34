#ifndef CSTRBIO_SUBSTRATE_BVP_HPP
#define CSTRBIO_SUBSTRATE_BVP_HPP

/**
 * @file substrate_bvp.hpp
 * @brief Rescaled substrate profile u[h,S] on [0,1] and its sensitivities.
 *
 * The substrate concentration inside a biofilm of thickness h with boundary
 * value S, mapped to the unit interval via y = z/h, solves
 *
 *     kappa u'' = h^2 r(u),   u'(0) = 0,  u(1) = S,
 *
 * or equivalently the fixed-point equation
 *
 *     u(y) = S - (h^2/kappa) int_y^1 int_0^eta r(u(xi)) dxi deta.
 *
 * The solver discretizes the integral form on a uniform grid and iterates
 * damped Picard with a dense Newton fallback on the same discrete operator,
 * so both iteration paths share one fixed point.
 */

#include <Eigen/Dense>

#include "cstrbio/errors.hpp"
#include "cstrbio/kinetics.hpp"

namespace cstrbio {

enum class SolveMethod {
    Auto,        ///< damped Picard, switch to Newton on stall or iteration cap
    PicardOnly,  ///< damped Picard only; fails where the map does not contract
    NewtonOnly,  ///< Newton from the start
};

struct BvpOptions {
    int n = 512;          ///< grid intervals on [0,1]; even, >= 8
    double tol = 1e-10;   ///< sup-norm defect tolerance on u - F(u)
    SolveMethod method = SolveMethod::Auto;
    int max_picard = 50;  ///< Picard budget before the Newton switch
    int max_newton = 40;
};

/// Solved profile. Nodes are uniform: y_i = i/n.
struct SubstrateProfile {
    double h = 0.0;
    double S = 0.0;
    Eigen::VectorXd u;          ///< concentration at the n+1 nodes
    double residual = 0.0;      ///< sup-norm defect of the integral equation
    double flux_scaled = 0.0;   ///< (h^2/kappa) int_0^1 r(u) dy = u'(1)

    int n() const { return static_cast<int>(u.size()) - 1; }
    double grid(int i) const { return static_cast<double>(i) / n(); }
    double u0() const { return u(0); }
};

enum class SensitivityKind { dS, dh };

/// Solution of the linearized profile equation: phi = d u[h,S] / dS or / dh.
struct SensitivityProfile {
    SensitivityKind kind = SensitivityKind::dS;
    Eigen::VectorXd values;
    Eigen::VectorXd dvalues;  ///< d phi / dy at the nodes
};

/// Solve the profile equation. h = 0 or S = 0 return the exact constant
/// profile without iteration; negative h or S are rejected.
/// Throws SolverError (carrying the last defect) on non-convergence.
SubstrateProfile solve_profile(double h, double S, const KineticsSet& kin,
                               const ModelParams& params, const BvpOptions& opts = {});

/// Same, starting the iteration from a previous profile on the same grid.
SubstrateProfile solve_profile(double h, double S, const KineticsSet& kin,
                               const ModelParams& params, const BvpOptions& opts,
                               const Eigen::VectorXd& initial_guess);

/// Solve kappa phi'' = h^2 r'(u) phi (+ 2 h r(u) for kind dh) with
/// phi'(0) = 0 and phi(1) = 1 (dS) or phi(1) = 0 (dh).
SensitivityProfile solve_sensitivity(const SubstrateProfile& profile, SensitivityKind kind,
                                     const KineticsSet& kin, const ModelParams& params);

struct SensitivityIntegrals {
    double G = 0.0;  ///< int_0^1 r'(u) d_S u dy, > 0 for S > 0
    double H = 0.0;  ///< int_0^1 r'(u) d_h u dy, <= 0
};

/// Composite-Simpson integrals of r'(u) against both sensitivities.
SensitivityIntegrals sensitivity_integrals(const SubstrateProfile& profile,
                                           const KineticsSet& kin, const ModelParams& params);

/// Substrate flux from the bulk into the biofilm, (rho h / kappa) int_0^1 r(u) dy.
/// Zero for h = 0.
double boundary_flux_term(const SubstrateProfile& profile, const ModelParams& params);

} // namespace cstrbio

#endif
