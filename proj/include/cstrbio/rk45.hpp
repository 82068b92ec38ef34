#ifndef CSTRBIO_RK45_HPP
#define CSTRBIO_RK45_HPP

#include <algorithm>
#include <cmath>

#include "cstrbio/errors.hpp"

namespace cstrbio {

/// One Dormand-Prince 5(4) step. Returns the 5th-order result and the
/// embedded error estimate; k1 may be supplied (FSAL) and k_last receives
/// the derivative at the accepted point.
template <class Vec, class Rhs>
void dp45_step(Rhs&& f, double t, const Vec& y, double dt, const Vec& k1,
               Vec& y5, Vec& err, Vec& k_last) {
    const Vec k2 = f(t + dt / 5.0, Vec(y + dt * (k1 / 5.0)));
    const Vec k3 = f(t + 3.0 * dt / 10.0, Vec(y + dt * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2)));
    const Vec k4 = f(t + 4.0 * dt / 5.0,
                     Vec(y + dt * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3)));
    const Vec k5 = f(t + 8.0 * dt / 9.0,
                     Vec(y + dt * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                   64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4)));
    const Vec k6 = f(t + dt, Vec(y + dt * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                           46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                           5103.0 / 18656.0 * k5)));
    y5 = y + dt * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                   2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    k_last = f(t + dt, y5);
    const Vec y4 = y + dt * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                             393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                             187.0 / 2100.0 * k6 + 1.0 / 40.0 * k_last);
    err = y5 - y4;
}

/// Adaptive integration from t0 to t1 with no state constraints; visit is
/// called at every accepted step as visit(t, y). Used for smooth initial
/// value problems (the shooting equations).
template <class Vec, class Rhs, class Visit>
Vec integrate_adaptive(Rhs&& f, double t0, const Vec& y0, double t1, double rtol,
                       double atol, Visit&& visit) {
    double t = t0;
    Vec y = y0;
    visit(t, y);
    if (t1 <= t0) return y;
    Vec k1 = f(t, y);
    double dt = (t1 - t0) / 100.0;
    const double dt_min = (t1 - t0) * 1e-14;
    Vec y5, err, klast;
    int guard = 0;
    while (t < t1) {
        if (++guard > 10'000'000)
            throw SolverError("integrate_adaptive: step budget exhausted", 0.0);
        dt = std::min(dt, t1 - t);
        dp45_step(f, t, y, dt, k1, y5, err, klast);
        double enorm = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            const double sc = atol + rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
            enorm = std::max(enorm, std::abs(err(i)) / sc);
        }
        if (enorm <= 1.0) {
            t += dt;
            y = y5;
            k1 = klast;  // FSAL
            visit(t, y);
        }
        const double fac = (enorm > 0.0)
                               ? std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 5.0)
                               : 5.0;
        dt *= fac;
        if (dt < dt_min && t < t1)
            throw SolverError("integrate_adaptive: step size underflow", enorm);
    }
    return y;
}

} // namespace cstrbio

#endif
