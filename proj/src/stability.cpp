#include "cstrbio/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cstrbio/assumptions.hpp"
#include "cstrbio/dynamics.hpp"

namespace cstrbio {

namespace {

constexpr double kVerdictMargin = 1e-10;

struct EquilibriumScalars {
    double a, b;        // affine net growth g(s) = a (s - b)
    double h, d, dp;    // thickness, d(h), d'(h)
    double nu, nup;     // nu(S*), nu'(S*)
    double Delta;
    double G, H;
    double D, k1, k2, alpha, rho, beta, kappa;
};

EquilibriumScalars gather(const EquilibriumPoint& eq, const ModelParams& params,
                          const KineticsSet& kin) {
    const auto& g = affine_net_growth(kin);
    const SensitivityIntegrals gh = sensitivity_integrals(eq.c_star, kin, params);
    EquilibriumScalars s{};
    s.a = g.gain;
    s.b = g.offset;
    s.h = eq.h_star;
    s.d = eval_d(kin, eq.h_star);
    s.dp = eval_d_prime(kin, eq.h_star);
    s.nu = eval_nu(kin, eq.S_star);
    s.nup = eval_nu_prime(kin, eq.S_star);
    s.Delta = params.alpha + params.k2() - s.nu;
    s.G = gh.G;
    s.H = gh.H;
    s.D = params.D;
    s.k1 = params.k1;
    s.k2 = params.k2();
    s.alpha = params.alpha;
    s.rho = params.rho;
    s.beta = params.beta;
    s.kappa = params.kappa;
    return s;
}

Eigen::Matrix3d assemble_jacobian(const EquilibriumScalars& s) {
    Eigen::Matrix3d A;
    A(0, 0) = s.a * s.h * s.H - s.alpha * s.d / s.Delta - s.dp * s.h;
    A(0, 1) = s.a * s.h * s.G;
    A(0, 2) = s.alpha / s.beta;
    A(1, 0) = -s.rho * (s.Delta - s.alpha) * s.d / (s.a * s.kappa * s.Delta) -
              s.b * s.rho / s.kappa - s.rho * s.h * s.H / s.kappa;
    A(1, 1) = -s.D - s.k1 * s.nup * s.beta * s.d * s.h / s.Delta -
              s.rho * s.h * s.G / s.kappa;
    A(1, 2) = -s.k1 * s.nu;
    A(2, 0) = s.beta * s.d + s.beta * s.dp * s.h;
    A(2, 1) = s.beta * s.d * s.h * s.nup / s.Delta;
    A(2, 2) = -s.Delta;
    return A;
}

// Expanded Routh-Hurwitz coefficients. Each push_back is one summand of the
// printed expansion; every summand is nonnegative under (NT) and (hh3)
// (note H <= 0), which is exactly what the per-term tests verify.
ClosedFormRouthHurwitz closed_form(const EquilibriumScalars& s) {
    const double a = s.a, b = s.b, h = s.h, d = s.d, dp = s.dp;
    const double nu = s.nu, nup = s.nup, Dl = s.Delta, G = s.G, H = s.H;
    const double D = s.D, k1 = s.k1, k2 = s.k2, al = s.alpha, rho = s.rho,
                 be = s.beta, ka = s.kappa;

    ClosedFormRouthHurwitz out;
    auto& t0 = out.terms[0];
    t0.push_back((-a * Dl * H + (Dl - al) * dp) * h * D);
    t0.push_back(-((a * be * k1 * ka * (al + k2) - al * rho) / (Dl * ka)) * h * h * nup * d * H);
    t0.push_back(((rho * (Dl - al) + a * be * k1 * ka * nu) * (d + h * dp) / ka +
                  a * b * rho * Dl / ka) *
                 h * G);
    t0.push_back(((rho * (Dl - al) + a * be * k1 * ka * nu) / (Dl * Dl * ka * a)) * al * h *
                 nup * d * d);
    t0.push_back((k2 / Dl) * be * k1 * h * h * nup * dp * d);
    t0.push_back(nup * al * rho * b * h * d / (Dl * ka));

    auto& t1 = out.terms[1];
    t1.push_back(-a * h * H);
    t1.push_back(al * d / Dl);
    t1.push_back(dp * h);
    t1.push_back(D);
    t1.push_back(be * k1 * nup * d * h / Dl);
    t1.push_back(rho * h * G / ka);
    t1.push_back(Dl);

    auto& t2 = out.terms[2];
    t2.push_back((-a * h * H + al * d / Dl + dp * h + Dl) * D);
    t2.push_back(((d + h * dp + a * b + Dl) / ka) * rho * h * G);
    t2.push_back(-(be * k1 * h * nup * d / Dl + Dl) * a * h * H);
    t2.push_back(al * be * k1 * h * nup * d * d / (Dl * Dl));
    t2.push_back(be * k1 * nup * h * h * d * dp / Dl);
    t2.push_back((al + k2) * be * k1 * nup * h * d / Dl);
    t2.push_back((Dl - al) * h * dp);

    auto& t3 = out.terms[3];
    t3.push_back((-a * h * H + al * d / Dl + dp * h + Dl) * D * D);
    t3.push_back((-a * h * H + (Dl + al) * d / Dl + 2.0 * h * dp + a * b + 2.0 * Dl) *
                 (rho * D * h / ka) * G);
    t3.push_back(a * a * D * h * h * H * H);
    t3.push_back(-2.0 * a * ((be * h * k1 * nup + al) * d / Dl + h * dp + Dl) * h * D * H);
    t3.push_back((2.0 * be * h * k1 * nup + al) * (al * D * d * d / (Dl * Dl)));
    t3.push_back((2.0 * (be * h * k1 * nup + al) * dp / Dl +
                  (2.0 * Dl + nu) * be * k1 * nup / Dl) *
                 h * d * D);
    t3.push_back(2.0 * al * d * D);
    t3.push_back(D * dp * dp * h * h);
    t3.push_back(2.0 * D * Dl * h * dp);
    t3.push_back(D * Dl * Dl);
    t3.push_back((d + h * dp + a * b + Dl) * (rho * rho * h * h / (ka * ka)) * G * G);
    t3.push_back(-((be * k1 * h * nup / Dl + 1.0) * d + h * dp + a * b + 2.0 * Dl) *
                 (a * h * h * rho / ka) * G * H);
    t3.push_back((be * k1 * h * (Dl + al) * nup / Dl + al) * (h * rho * d * d / (Dl * ka)) * G);
    t3.push_back((2.0 * be * k1 * h * nup + Dl + al) * (rho * h * h * dp * d / (Dl * ka)) * G);
    t3.push_back((2.0 * Dl + a * b + nu) * (rho * be * k1 * h * h * nup * d / (Dl * ka)) * G);
    t3.push_back(((2.0 * al * rho - a * be * k1 * ka * nu) * Dl + al * rho * a * b) *
                 (h * d / (Dl * ka)) * G);
    t3.push_back((rho * h * h * h * dp * dp / ka) * G);
    t3.push_back(((2.0 * Dl * rho - a * be * k1 * ka * nu) + a * b * rho) *
                 (h * h * dp / ka) * G);
    t3.push_back((rho * h * Dl * Dl / ka) * G);
    t3.push_back((be * k1 * h * nup * d / Dl + Dl) * a * a * h * h * H * H);
    t3.push_back(-(be * k1 * h * nup + 2.0 * al) *
                 (be * k1 * a * h * h * nup * d * d / (Dl * Dl)) * H);
    t3.push_back(-(2.0 * (h * dp + Dl) * a * be * k1 * ka + al * rho) *
                 (h * h * nup * d / (Dl * ka)) * H);
    t3.push_back(-((2.0 * Dl - al) * h * dp + Dl * Dl + al * d) * a * h * H);
    t3.push_back((be * k1 * h * nup + al) * (al * be * k1 * h * nup * d * d * d / (Dl * Dl * Dl)));
    t3.push_back((be * k1 * h * nup + 2.0 * al) * (be * k1 * h * h * nup / (Dl * Dl)) * dp * d * d);
    t3.push_back((Dl + nu) * (be * be * k1 * k1 * h * h * nup * nup / (Dl * Dl)) * d * d);
    t3.push_back(((2.0 * a * be * k1 * ka - rho) * Dl + al * rho) *
                 (al * h * nup / (Dl * Dl * ka * a)) * d * d);
    t3.push_back((be * k1 * h * h * h * nup * dp * dp / Dl) * d);
    t3.push_back((2.0 * be * k1 * nup * h * h + (Dl - al) * al * h / Dl) * dp * d);
    t3.push_back((Dl * be * k1 * ka * (al + k2) - al * b * rho) * (h * nup * d / (Dl * ka)));
    t3.push_back((Dl - al) * (h * h * dp * dp + Dl * h * dp));

    for (int i = 0; i < 4; ++i) {
        const double sum = std::accumulate(out.terms[i].begin(), out.terms[i].end(), 0.0);
        if (i == 0) out.m.m0 = sum;
        if (i == 1) out.m.m1 = sum;
        if (i == 2) out.m.m2 = sum;
        if (i == 3) out.m.m3 = sum;
    }
    return out;
}

StabilityVerdictKind verdict_from(const RouthHurwitz& m,
                                  const std::array<std::complex<double>, 3>& eig) {
    const double min_m = std::min({m.m0, m.m1, m.m2, m.m3});
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& z : eig) max_re = std::max(max_re, z.real());
    if (min_m > kVerdictMargin) return StabilityVerdictKind::LocallyStable;
    if (min_m < -kVerdictMargin || max_re > kVerdictMargin)
        return StabilityVerdictKind::Unstable;
    return StabilityVerdictKind::Inconclusive;
}

std::array<std::complex<double>, 3> eigenvalues_of(const Eigen::Matrix3d& A) {
    Eigen::EigenSolver<Eigen::Matrix3d> solver(A);
    std::array<std::complex<double>, 3> eig;
    for (int i = 0; i < 3; ++i) eig[i] = solver.eigenvalues()(i);
    std::sort(eig.begin(), eig.end(), [](const auto& x, const auto& y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return eig;
}

} // namespace

Eigen::Matrix3d nontrivial_jacobian(const EquilibriumPoint& eq, const ModelParams& params,
                                    const KineticsSet& kin) {
    return assemble_jacobian(gather(eq, params, kin));
}

Eigen::Matrix3d jacobian_fd(const Eigen::Vector3d& state, const ModelParams& params,
                            const KineticsSet& kin, double step, const BvpOptions& bvp) {
    BvpOptions tight = bvp;
    tight.tol = std::min(bvp.tol, 1e-13);  // keep quotient noise below truncation
    auto f = [&](const Eigen::Vector3d& x) {
        return rhs({0.0, x(0), x(1), x(2)}, kin, params, tight);
    };
    Eigen::Matrix3d J;
    for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e(j) = step;
        if (state(j) >= step) {
            J.col(j) = (f(state + e) - f(state - e)) / (2.0 * step);
        } else {
            // one-sided second order at the nonnegativity boundary
            J.col(j) =
                (-3.0 * f(state) + 4.0 * f(state + e) - f(state + 2.0 * e)) / (2.0 * step);
        }
    }
    return J;
}

RouthHurwitz routh_hurwitz_matrix(const Eigen::Matrix3d& A) {
    RouthHurwitz m;
    m.m0 = -A.determinant();
    m.m1 = -A.trace();
    auto minor = [&](int i, int j) { return A(i, i) * A(j, j) - A(i, j) * A(j, i); };
    m.m2 = minor(0, 1) + minor(0, 2) + minor(1, 2);
    m.m3 = m.m1 * m.m2 - m.m0;
    return m;
}

ClosedFormRouthHurwitz routh_hurwitz_closed_form(const EquilibriumPoint& eq,
                                                 const ModelParams& params,
                                                 const KineticsSet& kin) {
    return closed_form(gather(eq, params, kin));
}

StabilityReport stability_verdict(const EquilibriumPoint& eq, const ModelParams& params,
                                  const KineticsSet& kin) {
    StabilityReport rep;
    const AssumptionReport assume = validate_assumptions(params, kin);
    rep.hh3_holds = assume.hh3.holds;

    if (eq.h_star == 0.0) {
        // washout point: the interior closed forms bake in the equilibrium
        // identity for the net-growth integral, which fails at h = 0. Use the
        // washout Jacobian; both m-routes then read off that matrix.
        const WashoutReport wash = washout_analysis(params, kin);
        rep.jacobian_analytic = wash.jacobian;
        const SensitivityIntegrals gh = sensitivity_integrals(eq.c_star, kin, params);
        rep.G = gh.G;
        rep.H = gh.H;
        rep.Delta = params.alpha + params.k2() - eval_nu(kin, eq.S_star);
        rep.matrix_route = routh_hurwitz_matrix(rep.jacobian_analytic);
        rep.closed_form = rep.matrix_route;
        rep.closed_form_terms = {std::vector<double>{rep.matrix_route.m0},
                                 std::vector<double>{rep.matrix_route.m1},
                                 std::vector<double>{rep.matrix_route.m2},
                                 std::vector<double>{rep.matrix_route.m3}};
    } else {
        const EquilibriumScalars s = gather(eq, params, kin);
        rep.jacobian_analytic = assemble_jacobian(s);
        rep.G = s.G;
        rep.H = s.H;
        rep.Delta = s.Delta;
        rep.matrix_route = routh_hurwitz_matrix(rep.jacobian_analytic);
        const ClosedFormRouthHurwitz cf = closed_form(s);
        rep.closed_form = cf.m;
        rep.closed_form_terms = cf.terms;
    }

    rep.jacobian_fd =
        jacobian_fd({eq.h_star, eq.S_star, eq.Q_star}, params, kin, 1e-5, BvpOptions{});
    rep.eigenvalues = eigenvalues_of(rep.jacobian_analytic);
    rep.verdict = verdict_from(rep.matrix_route, rep.eigenvalues);
    rep.hypothesis_gap =
        rep.verdict == StabilityVerdictKind::LocallyStable && !rep.hh3_holds;
    return rep;
}

} // namespace cstrbio
