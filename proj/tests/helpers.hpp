#ifndef CSTRBIO_TESTS_HELPERS_HPP
#define CSTRBIO_TESTS_HELPERS_HPP

#include <cmath>

#include "cstrbio/kinetics.hpp"

namespace cstrbio::testing {

// Reference parameter set used throughout the suite: Monod growth for both
// populations, unit reactor constants, linear detachment, g(s) = s - 2.
inline ModelParams reference_params(double sstar) {
    ModelParams p;
    p.kappa = p.D = p.k1 = p.kQ = p.alpha = p.rho = p.beta = 1.0;
    p.sstar = sstar;
    return p;
}

inline KineticsSet reference_kinetics() {
    KineticsSet k;
    k.r = MonodLaw{4.0, 1.0};
    k.nu = MonodLaw{2.0, 1.0};
    k.g = AffineLaw{1.0, 2.0};
    k.d = LinearLaw{1.0};
    return k;
}

inline bool close_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace cstrbio::testing

#endif
