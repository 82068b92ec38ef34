#ifndef CSTRBIO_EQUILIBRIA_HPP
#define CSTRBIO_EQUILIBRIA_HPP

/**
 * @file equilibria.hpp
 * @brief Washout spectral analysis and the two nontrivial-equilibrium finders.
 *
 * The washout equilibrium (0, S*, 0) has a closed-form Jacobian whose
 * eigenvalues are real; local and global stability verdicts follow from sign
 * conditions on p = g(r(S*)) - d(0) and q = nu(S*) - k2 - alpha.
 *
 * Nontrivial equilibria are located by two independent routes:
 *  - the general reduction: eliminate Q, solve E(h, S(h)) = D S* for S(h) by
 *    bracketed root finding on the profile-based E, then scan
 *    GG(h) = G(h, S(h)) for sign changes;
 *  - the shooting construction (affine g only): integrate the profile ODE
 *    from the wall with unknown center value mu, reduce to the scalar
 *    function B(mu), and take its unique root below mu_underline.
 */

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cstrbio/kinetics.hpp"
#include "cstrbio/substrate_bvp.hpp"

namespace cstrbio {

enum class LocalVerdict { Stable, Unstable, Marginal };
enum class GlobalVerdict { GloballyStable, Unknown };

struct WashoutReport {
    Eigen::Matrix3d jacobian;
    double p = 0.0;             ///< g(r(S*)) - d(0)
    double q = 0.0;             ///< nu(S*) - k2 - alpha
    double lambda0 = 0.0;       ///< -D
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    bool s1_holds = false;
    bool s2_holds = false;
    LocalVerdict local_verdict = LocalVerdict::Marginal;
    GlobalVerdict global_verdict = GlobalVerdict::Unknown;
};

/// Closed-form washout analysis. Verdict margins: eigenvalues within 1e-10
/// of zero report Marginal rather than forcing a sign.
WashoutReport washout_analysis(const ModelParams& params, const KineticsSet& kin);

enum class EquilibriumMethod { Reduction, Shooting };

struct EquilibriumPoint {
    double h_star = 0.0;
    double S_star = 0.0;
    double Q_star = 0.0;
    SubstrateProfile c_star;      ///< profile u[h*, S*] at the equilibrium
    double Delta = 0.0;           ///< alpha + k2 - nu(S_star), > alpha
    EquilibriumMethod method = EquilibriumMethod::Reduction;
    Eigen::Vector3d residuals{0.0, 0.0, 0.0};  ///< |f_i| of the stationarity system
};

/// Unique root S in (0, S*] of E(h, S) = D S*; E is strictly increasing in S.
/// S(0) = S*. Throws InfeasibleError if E(h, S*) < D S*.
double S_of_h_general(double h, const ModelParams& params, const KineticsSet& kin,
                      const BvpOptions& bvp = {}, double root_tol = 1e-12);

struct ReductionScanOptions {
    double h_min = 1e-4;
    double growth = 2.0;        ///< geometric grid factor
    double cap_factor = 10.0;   ///< cap = cap_factor * h_* when available
    double fallback_cap = 1e3;  ///< cap without a shooting h_*
    double root_tol = 1e-12;
    BvpOptions bvp{};
};

struct ReductionResult {
    std::vector<EquilibriumPoint> points;
    std::string diagnostic;  ///< set when conditions fail or the scan truncates
};

/// Scan GG(h) = G(h, S(h)) on a geometric grid and refine every bracketing
/// pair. Returns empty with a diagnostic when the existence conditions
/// (n1)/(n2) fail; throws NoEquilibriumError when the scan finds no sign
/// change up to the cap.
ReductionResult find_equilibrium_reduction(const ModelParams& params, const KineticsSet& kin,
                                           const ReductionScanOptions& opts = {});

/// State of the shooting initial value problem at one z:
/// c'' = r(c)/kappa from c(0) = mu, c'(0) = 0, together with the variational
/// solution w'' = r'(c) w / kappa, w(0) = 1, w'(0) = 0.
struct ShootingState {
    double c = 0.0;
    double cz = 0.0;
    double w = 0.0;
    double wz = 0.0;
};

struct ShootingSolution {
    double mu = 0.0;
    std::vector<double> z;  ///< accepted integration nodes, z[0] = 0
    std::vector<ShootingState> states;
};

struct ShootOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
};

/// Integrate the shooting system over [0, z_max], keeping accepted steps.
ShootingSolution shoot_profile(double mu, double z_max, const KineticsSet& kin,
                               const ModelParams& params, const ShootOptions& opts = {});

/// Shooting state at exactly z (fresh adaptive integration).
ShootingState shoot_at(double mu, double z, const KineticsSet& kin,
                       const ModelParams& params, const ShootOptions& opts = {});

/// Thickness cap h_*: unique root of F(h, 0) = D S*.
double h_star_cap(const ModelParams& params, const KineticsSet& kin);

/// Unique root S(h) of F(h, S) = D S* on [0, S*] for h in [0, h_*]; strictly
/// decreasing with S(0) = S* and S(h_*) = 0. Closed form, no profile solve.
/// Throws PreconditionError when (NT) fails.
double S_of_h_shooting(double h, const ModelParams& params, const KineticsSet& kin);

/// Unique root h(mu) of c(z, mu) = S(z) on [0, h_*]; strictly decreasing with
/// h(0) = h_* and h(S*) = 0.
double h_of_mu(double mu, const ModelParams& params, const KineticsSet& kin,
               const ShootOptions& opts = {});

/// Unique zero of M(0, mu) = -a (r(mu) - b) + [(k2 - nu(S(h(mu)))) / Delta] d(h(mu));
/// the root of B is confined to (0, mu_underline].
double mu_underline(const ModelParams& params, const KineticsSet& kin,
                    const ShootOptions& opts = {});

/// Boundary-defect function of the shooting construction; its only zeros on
/// [0, S*] are mu = S* (washout) and the nontrivial equilibrium mu_*.
double shooting_defect(double mu, const ModelParams& params, const KineticsSet& kin,
                       const ShootOptions& opts = {});

struct ShootingFindOptions {
    int scan_points = 256;  ///< uniform mu grid for bracketing B
    double root_tol = 1e-12;
    ShootOptions shoot{};
    BvpOptions bvp{};  ///< used to assemble the returned profile
};

/// Locate the unique nontrivial equilibrium under (GA), (gg), (NT).
/// Throws PreconditionError when the structural conditions fail and
/// ModelViolationError when a guaranteed sign assertion does not hold.
EquilibriumPoint find_equilibrium_shooting(const ModelParams& params, const KineticsSet& kin,
                                           const ShootingFindOptions& opts = {});

} // namespace cstrbio

#endif
