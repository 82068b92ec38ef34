#ifndef CSTRBIO_ASSUMPTIONS_HPP
#define CSTRBIO_ASSUMPTIONS_HPP

#include <string>
#include <utility>
#include <vector>

#include "cstrbio/kinetics.hpp"

namespace cstrbio {

struct ConditionResult {
    bool holds = false;
    std::string detail;  ///< evaluated quantities, for the report line
};

/**
 * Structural-condition report for one (params, kinetics) pair.
 *
 * Names follow the model's condition labels:
 *   g0/g1/g2   basic regularity and sign structure of g, r, nu, d
 *   gg         g is affine, g(s) = a(s - b)
 *   h1         nu nondecreasing, d strictly increasing
 *   h2         k2 > nu(S*) and g(r(S*)) (alpha+k2-nu(S*)) > d(0)(k2-nu(S*))
 *   h3a        alpha / (a (alpha+k2)) <= beta k1 kappa / rho
 *   h3b        nu'(S) / (alpha+k2-nu(S))^2 strictly monotone on [0, S*]
 *   hh3        max{1/(2a), b/(alpha+k2), alpha/(a(alpha+k2))}
 *                <= beta k1 kappa / rho <= 2 alpha / (a nu(S*))
 *   n1, n2     existence conditions for a nontrivial equilibrium
 *   s1, s2     local stability of the washout equilibrium
 *   global_washout   hypotheses for global washout stability
 */
struct AssumptionReport {
    ConditionResult g0, g1, g2, gg;
    ConditionResult h1, h2, h3a, h3b, hh3;
    ConditionResult n1, n2;
    ConditionResult s1, s2;
    ConditionResult global_washout;

    bool nt() const { return h1.holds && h2.holds && (h3a.holds || h3b.holds); }

    std::vector<std::pair<std::string, const ConditionResult*>> items() const {
        return {
            {"(G0)", &g0},   {"(G1)", &g1},   {"(G2)", &g2},   {"(gg)", &gg},
            {"(h1)", &h1},   {"(h2)", &h2},   {"(h3a)", &h3a}, {"(h3b)", &h3b},
            {"(hh3)", &hh3}, {"(n1)", &n1},   {"(n2)", &n2},   {"(S1)", &s1},
            {"(S2)", &s2},   {"(global)", &global_washout},
        };
    }
};

/// Evaluate every structural condition. Always returns a report; nothing
/// throws for false conditions.
AssumptionReport validate_assumptions(const ModelParams& params, const KineticsSet& kin);

/// Grid check of (h3b): strict monotonicity of nu'(S)/(alpha+k2-nu(S))^2 on a
/// uniform sample of [0, S*], strict comparisons at tolerance `tol`.
bool h3b_grid_check(const ModelParams& params, const KineticsSet& kin, int samples = 1024,
                    double tol = 1e-12);

/// Analytic (h3b) criterion for Monod nu: holds iff alpha + k2 != mu_nu.
bool h3b_analytic_monod(const ModelParams& params, const KineticsSet& kin);

/// One line per condition, booleans plus the evaluated numbers.
std::string render_assumption_report(const AssumptionReport& report);

} // namespace cstrbio

#endif
