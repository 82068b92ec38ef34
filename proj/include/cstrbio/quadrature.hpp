#ifndef CSTRBIO_QUADRATURE_HPP
#define CSTRBIO_QUADRATURE_HPP

#include <Eigen/Dense>
#include <stdexcept>

namespace cstrbio {

/// Cumulative integral I(x_i) = int_{x_0}^{x_i} f on a uniform grid, sixth
/// order: each panel integrates the quintic through the six nearest nodes.
/// Needs at least 6 nodes.
inline Eigen::VectorXd cumulative_integral(const Eigen::VectorXd& f, double dx) {
    const Eigen::Index n = f.size() - 1;
    if (n < 5) throw std::invalid_argument("cumulative_integral: need >= 6 nodes");
    // panel weights over node stencils (denominator 1440)
    static const double w0[6] = {475, 1427, -798, 482, -173, 27};
    static const double w1[6] = {-27, 637, 1022, -258, 77, -11};
    static const double w2[6] = {11, -93, 802, 802, -93, 11};
    const double s = dx / 1440.0;
    Eigen::VectorXd I(n + 1);
    I(0) = 0.0;
    double acc = 0.0;
    for (int k = 0; k < 6; ++k) acc += w0[k] * f(k);
    I(1) = s * acc;
    acc = 0.0;
    for (int k = 0; k < 6; ++k) acc += w1[k] * f(k);
    I(2) = I(1) + s * acc;
    for (Eigen::Index i = 2; i + 2 < n; ++i) {
        acc = 0.0;
        for (int k = 0; k < 6; ++k) acc += w2[k] * f(i - 2 + k);
        I(i + 1) = I(i) + s * acc;
    }
    acc = 0.0;
    for (int k = 0; k < 6; ++k) acc += w1[5 - k] * f(n - 5 + k);
    I(n - 1) = I(n - 2) + s * acc;
    acc = 0.0;
    for (int k = 0; k < 6; ++k) acc += w0[5 - k] * f(n - 5 + k);
    I(n) = I(n - 1) + s * acc;
    return I;
}

/// int_{x_0}^{x_n} f on a uniform grid (sixth order).
inline double integral(const Eigen::VectorXd& f, double dx) {
    const Eigen::Index n = f.size() - 1;
    if (n < 5) throw std::invalid_argument("integral: need >= 6 nodes");
    static const double w0[6] = {475, 1427, -798, 482, -173, 27};
    static const double w1[6] = {-27, 637, 1022, -258, 77, -11};
    static const double w2[6] = {11, -93, 802, 802, -93, 11};
    double acc = 0.0;
    for (int k = 0; k < 6; ++k) acc += (w0[k] + w1[k]) * f(k);
    for (Eigen::Index i = 2; i + 2 < n; ++i)
        for (int k = 0; k < 6; ++k) acc += w2[k] * f(i - 2 + k);
    for (int k = 0; k < 6; ++k) acc += (w1[5 - k] + w0[5 - k]) * f(n - 5 + k);
    return dx / 1440.0 * acc;
}

/// Composite Simpson rule; requires an even number of intervals.
inline double simpson(const Eigen::VectorXd& f, double dx) {
    const Eigen::Index n = f.size() - 1;
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("simpson: need an even interval count");
    double acc = f(0) + f(n);
    for (Eigen::Index i = 1; i < n; i += 2) acc += 4.0 * f(i);
    for (Eigen::Index i = 2; i < n; i += 2) acc += 2.0 * f(i);
    return dx / 3.0 * acc;
}

} // namespace cstrbio

#endif
