#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "cstrbio/stability.hpp"
#include "cstrbio/substrate_bvp.hpp"
#include "helpers.hpp"

using namespace cstrbio;
using namespace cstrbio::testing;

namespace {

EquilibriumPoint reference_equilibrium() {
    static const EquilibriumPoint eq =
        find_equilibrium_shooting(reference_params(5.0), reference_kinetics());
    return eq;
}

} // namespace

TEST_CASE("Routh-Hurwitz coefficients of simple matrices") {
    const Eigen::Matrix3d minus_identity = -Eigen::Matrix3d::Identity();
    const RouthHurwitz a = routh_hurwitz_matrix(minus_identity);
    CHECK(a.m0 == doctest::Approx(1.0));
    CHECK(a.m1 == doctest::Approx(3.0));
    CHECK(a.m2 == doctest::Approx(3.0));
    CHECK(a.m3 == doctest::Approx(8.0));

    Eigen::Matrix3d diag = Eigen::Matrix3d::Zero();
    diag.diagonal() << -1.0, -2.0, -3.0;
    const RouthHurwitz b = routh_hurwitz_matrix(diag);
    CHECK(b.m0 == doctest::Approx(6.0));
    CHECK(b.m1 == doctest::Approx(6.0));
    CHECK(b.m2 == doctest::Approx(11.0));
    CHECK(b.m3 == doctest::Approx(60.0));
}

TEST_CASE("Routh-Hurwitz signs match the eigenvalue criterion") {
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    int tested = 0;
    while (tested < 1000) {
        Eigen::Matrix3d A;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) A(i, j) = u(rng);
        const RouthHurwitz m = routh_hurwitz_matrix(A);
        const Eigen::EigenSolver<Eigen::Matrix3d> solver(A);
        double max_re = -1e300;
        for (int i = 0; i < 3; ++i)
            max_re = std::max(max_re, solver.eigenvalues()(i).real());
        const double min_m = std::min({m.m0, m.m1, m.m2, m.m3});
        // skip draws too close to the stability boundary for a strict check
        if (std::abs(max_re) < 1e-6 || std::abs(min_m) < 1e-6) continue;
        CHECK((min_m > 0.0) == (max_re < 0.0));
        ++tested;
    }
}

TEST_CASE("interior Jacobian: fixed entries") {
    const ModelParams p = reference_params(5.0);
    const KineticsSet kin = reference_kinetics();
    const EquilibriumPoint eq = reference_equilibrium();
    const Eigen::Matrix3d A = nontrivial_jacobian(eq, p, kin);
    CHECK(A(2, 2) == doctest::Approx(-eq.Delta).epsilon(1e-14));
    CHECK(A(0, 2) == doctest::Approx(p.alpha / p.beta).epsilon(1e-14));
}

TEST_CASE("interior Jacobian matches finite differences") {
    const ModelParams p = reference_params(5.0);
    const KineticsSet kin = reference_kinetics();
    const EquilibriumPoint eq = reference_equilibrium();
    const Eigen::Matrix3d A = nontrivial_jacobian(eq, p, kin);
    const Eigen::Matrix3d F = jacobian_fd({eq.h_star, eq.S_star, eq.Q_star}, p, kin);
    CHECK((A - F).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("finite-difference Jacobian at the washout matches the closed form") {
    const ModelParams p = reference_params(0.5);
    const KineticsSet kin = reference_kinetics();
    const WashoutReport wash = washout_analysis(p, kin);
    const Eigen::Matrix3d F = jacobian_fd({0.0, 0.5, 0.0}, p, kin);
    CHECK((wash.jacobian - F).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("closed-form coefficients match the matrix route term by term") {
    const ModelParams p = reference_params(5.0);
    const KineticsSet kin = reference_kinetics();
    const EquilibriumPoint eq = reference_equilibrium();

    const RouthHurwitz mm = routh_hurwitz_matrix(nontrivial_jacobian(eq, p, kin));
    const ClosedFormRouthHurwitz cf = routh_hurwitz_closed_form(eq, p, kin);
    CHECK(close_rel(cf.m.m0, mm.m0, 1e-8));
    CHECK(close_rel(cf.m.m1, mm.m1, 1e-8));
    CHECK(close_rel(cf.m.m2, mm.m2, 1e-8));
    CHECK(close_rel(cf.m.m3, mm.m3, 1e-8));

    CHECK(cf.terms[0].size() == 6);
    CHECK(cf.terms[1].size() == 7);
    CHECK(cf.terms[2].size() == 7);
    CHECK(cf.terms[3].size() == 31);
    for (const auto& terms : cf.terms)
        for (double t : terms) CHECK(t >= -1e-12);  // the sign argument under (hh3)

    // transcription check of the m1 summands
    const SensitivityIntegrals gi = sensitivity_integrals(eq.c_star, kin, p);
    const double d = eval_d(kin, eq.h_star);
    const double m1_direct = -1.0 * eq.h_star * gi.H + p.alpha * d / eq.Delta +
                             1.0 * eq.h_star + p.D +
                             p.beta * p.k1 * eval_nu_prime(kin, eq.S_star) * d * eq.h_star /
                                 eq.Delta +
                             p.rho * eq.h_star * gi.G / p.kappa + eq.Delta;
    CHECK(close_rel(m1_direct, cf.m.m1, 1e-12));
}

TEST_CASE("stability verdict at the reference equilibrium") {
    const ModelParams p = reference_params(5.0);
    const KineticsSet kin = reference_kinetics();
    const StabilityReport rep = stability_verdict(reference_equilibrium(), p, kin);
    CHECK(rep.verdict == StabilityVerdictKind::LocallyStable);
    CHECK(rep.hh3_holds);
    CHECK_FALSE(rep.hypothesis_gap);
    CHECK(rep.G > 0.0);
    CHECK(rep.H <= 0.0);
    CHECK(rep.Delta > p.alpha);
    for (const auto& z : rep.eigenvalues) CHECK(z.real() < 0.0);
    CHECK((rep.jacobian_analytic - rep.jacobian_fd).cwiseAbs().maxCoeff() <= 1e-5);
    CHECK(close_rel(rep.matrix_route.m0, rep.closed_form.m0, 1e-8));
    CHECK(close_rel(rep.matrix_route.m3, rep.closed_form.m3, 1e-8));
}

TEST_CASE("verdict is consistent with the washout analysis at h = 0") {
    const ModelParams p = reference_params(0.5);
    const KineticsSet kin = reference_kinetics();
    EquilibriumPoint washout;
    washout.h_star = 0.0;
    washout.S_star = 0.5;
    washout.Q_star = 0.0;
    washout.Delta = p.alpha + p.k2() - eval_nu(kin, 0.5);
    washout.c_star = solve_profile(0.0, 0.5, kin, p);

    const StabilityReport rep = stability_verdict(washout, p, kin);
    for (const auto& z : rep.eigenvalues) CHECK(z.real() < 0.0);
    CHECK(std::abs(rep.eigenvalues[2].real() - (-2.0 / 3.0)) <= 1e-10);
    CHECK(rep.verdict == StabilityVerdictKind::LocallyStable);
    CHECK(rep.matrix_route.m0 == doctest::Approx(rep.closed_form.m0));
}

TEST_CASE("closed form vs matrix route across inlet levels") {
    for (double sstar : {3.0, 4.0, 8.0}) {
        const ModelParams p = reference_params(sstar);
        const KineticsSet kin = reference_kinetics();
        const EquilibriumPoint eq = find_equilibrium_shooting(p, kin);
        const StabilityReport rep = stability_verdict(eq, p, kin);
        CHECK(close_rel(rep.matrix_route.m0, rep.closed_form.m0, 1e-8));
        CHECK(close_rel(rep.matrix_route.m1, rep.closed_form.m1, 1e-8));
        CHECK(close_rel(rep.matrix_route.m2, rep.closed_form.m2, 1e-8));
        CHECK(close_rel(rep.matrix_route.m3, rep.closed_form.m3, 1e-8));
    }
}
