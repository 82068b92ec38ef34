#ifndef CSTRBIO_STABILITY_HPP
#define CSTRBIO_STABILITY_HPP

/**
 * @file stability.hpp
 * @brief Jacobian and Routh-Hurwitz analysis at the nontrivial equilibrium.
 *
 * The Jacobian at an interior equilibrium has a closed form in terms of the
 * sensitivity integrals G and H, Delta = alpha + k2 - nu(S*), the detachment
 * law and the affine net growth. The Routh-Hurwitz coefficients
 *
 *   m0 = -det(A), m1 = -trace(A), m2 = sum of principal 2x2 minors,
 *   m3 = m1 m2 - m0
 *
 * are computed twice: from the assembled matrix, and from fully expanded
 * per-term polynomial expressions whose summands are individually
 * nonnegative under the structural conditions. The two routes are
 * independent checks on each other; the per-term lists let tests verify the
 * sign argument directly.
 */

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "cstrbio/equilibria.hpp"
#include "cstrbio/kinetics.hpp"

namespace cstrbio {

struct RouthHurwitz {
    double m0 = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;  ///< m1 * m2 - m0
};

struct ClosedFormRouthHurwitz {
    RouthHurwitz m;
    std::array<std::vector<double>, 4> terms;  ///< summands of m0..m3
};

enum class StabilityVerdictKind { LocallyStable, Unstable, Inconclusive };

struct StabilityReport {
    Eigen::Matrix3d jacobian_analytic;
    Eigen::Matrix3d jacobian_fd;
    double G = 0.0;
    double H = 0.0;
    double Delta = 0.0;
    RouthHurwitz matrix_route;
    RouthHurwitz closed_form;
    std::array<std::vector<double>, 4> closed_form_terms;
    std::array<std::complex<double>, 3> eigenvalues;
    StabilityVerdictKind verdict = StabilityVerdictKind::Inconclusive;
    bool hh3_holds = false;
    bool hypothesis_gap = false;  ///< stable verdict although (hh3) fails
};

/// Closed-form Jacobian at an interior equilibrium (affine g required).
/// G and H are computed from the equilibrium profile's sensitivities.
Eigen::Matrix3d nontrivial_jacobian(const EquilibriumPoint& eq, const ModelParams& params,
                                    const KineticsSet& kin);

/// Finite-difference Jacobian of the dynamics right-hand side at `state`.
/// Central differences; components closer than `step` to the boundary use a
/// one-sided second-order stencil. Profiles are solved to a tightened
/// tolerance so quotient noise stays below the stencil truncation error.
Eigen::Matrix3d jacobian_fd(const Eigen::Vector3d& state, const ModelParams& params,
                            const KineticsSet& kin, double step = 1e-5,
                            const BvpOptions& bvp = {});

/// Routh-Hurwitz coefficients of a 3x3 matrix.
RouthHurwitz routh_hurwitz_matrix(const Eigen::Matrix3d& A);

/// Expanded per-term coefficients at an interior equilibrium (affine g).
ClosedFormRouthHurwitz routh_hurwitz_closed_form(const EquilibriumPoint& eq,
                                                 const ModelParams& params,
                                                 const KineticsSet& kin);

/// Full report. Verdict margins are 1e-10 on every sign; anything closer to
/// zero is Inconclusive. A washout point (h_star == 0) is analyzed with the
/// closed-form washout Jacobian instead of the interior formulas.
StabilityReport stability_verdict(const EquilibriumPoint& eq, const ModelParams& params,
                                  const KineticsSet& kin);

} // namespace cstrbio

#endif
