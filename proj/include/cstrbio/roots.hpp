#ifndef CSTRBIO_ROOTS_HPP
#define CSTRBIO_ROOTS_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace cstrbio {

struct RootOptions {
    double xtol = 1e-12;
    int max_iter = 200;
};

/// Brent's method on a bracketing interval [a, b] with f(a)*f(b) <= 0.
/// Throws std::invalid_argument if the endpoints do not bracket a root.
template <class F>
double brent(F&& f, double a, double b, RootOptions opts = {}) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw std::invalid_argument("brent: endpoints do not bracket a root");

    double c = a, fc = fa;
    double d = b - a, e = d;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * opts.xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // inverse quadratic interpolation, secant if only two points
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double rr = fb / fc;
                p = s * (2.0 * xm * qq * (qq - rr) - (b - a) * (rr - 1.0));
                q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
    }
    return b;
}

/// Expand [0, b0] by doubling until f changes sign. f(0) must be < 0.
/// Returns the bracketing pair (lo, hi).
template <class F>
std::pair<double, double> expand_bracket(F&& f, double b0, int max_doublings = 60) {
    double lo = 0.0, hi = b0;
    for (int k = 0; k < max_doublings; ++k) {
        if (f(hi) >= 0.0) return {lo, hi};
        lo = hi;
        hi *= 2.0;
    }
    throw std::runtime_error("expand_bracket: no sign change found");
}

} // namespace cstrbio

#endif
