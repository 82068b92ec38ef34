#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "cstrbio/equilibria.hpp"
#include "cstrbio/quadrature.hpp"
#include "helpers.hpp"

using namespace cstrbio;
using namespace cstrbio::testing;

namespace {

const double kHStarCap = 0.5 * (std::sqrt(39.0) - 3.0);  // root of (2/3)h^2 + 2h = 5

std::array<double, 3> sorted_closed_form(const WashoutReport& rep) {
    std::array<double, 3> v{rep.lambda0, rep.lambda_plus, rep.lambda_minus};
    std::sort(v.begin(), v.end());
    return v;
}

std::array<double, 3> sorted_numeric(const Eigen::Matrix3d& J) {
    const Eigen::EigenSolver<Eigen::Matrix3d> solver(J);
    std::array<double, 3> v;
    for (int i = 0; i < 3; ++i) v[i] = solver.eigenvalues()(i).real();
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST_CASE("washout spectrum at S* = 0.5: stable, globally stable") {
    const WashoutReport rep = washout_analysis(reference_params(0.5), reference_kinetics());
    CHECK(std::abs(rep.lambda0 - (-1.0)) <= 1e-12);
    CHECK(std::abs(rep.lambda_plus - (-2.0 / 3.0)) <= 1e-12);
    CHECK(std::abs(rep.lambda_minus - (-7.0 / 3.0)) <= 1e-12);
    CHECK(rep.s1_holds);
    CHECK(rep.s2_holds);
    CHECK(rep.local_verdict == LocalVerdict::Stable);
    CHECK(rep.global_verdict == GlobalVerdict::GloballyStable);
}

TEST_CASE("washout spectrum at S* = 5: unstable") {
    const WashoutReport rep = washout_analysis(reference_params(5.0), reference_kinetics());
    CHECK(std::abs(rep.lambda_plus - 4.0 / 3.0) <= 1e-12);
    CHECK(std::abs(rep.lambda_minus - (-4.0 / 3.0)) <= 1e-12);
    CHECK(rep.local_verdict == LocalVerdict::Unstable);
    CHECK(rep.global_verdict == GlobalVerdict::Unknown);
}

TEST_CASE("washout marginal case: g(r(S*)) = 0 at S* = 1") {
    // monod(4,1): r(1) = 2 = b, so p = 0 and lambda_plus = 0
    const WashoutReport rep = washout_analysis(reference_params(1.0), reference_kinetics());
    CHECK(std::abs(rep.lambda_plus) <= 1e-12);
    CHECK(rep.local_verdict == LocalVerdict::Marginal);
}

TEST_CASE("closed-form eigenvalues match a numeric eigensolve") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        ModelParams p;
        p.kappa = u(rng);
        p.D = u(rng);
        p.k1 = u(rng);
        p.kQ = u(rng);
        p.alpha = u(rng);
        p.rho = u(rng);
        p.beta = u(rng);
        p.sstar = 0.3 + 2.5 * u(rng);
        KineticsSet kin;
        kin.r = MonodLaw{0.5 + u(rng), u(rng)};
        kin.nu = MonodLaw{0.5 + u(rng), u(rng)};
        kin.g = AffineLaw{u(rng), u(rng)};
        kin.d = (trial % 2 == 0) ? DetachmentLaw{LinearLaw{u(rng)}}
                                 : DetachmentLaw{ConstantLaw{u(rng)}};
        const WashoutReport rep = washout_analysis(p, kin);
        const auto cf = sorted_closed_form(rep);
        const auto nm = sorted_numeric(rep.jacobian);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(cf[i] - nm[i]) <= 1e-8);
        CHECK(rep.lambda_plus >= rep.lambda_minus);
    }
}

TEST_CASE("S_of_h_general endpoints and the published point") {
    const ModelParams p = reference_params(5.0);
    const KineticsSet kin = reference_kinetics();
    CHECK(S_of_h_general(0.0, p, kin) == 5.0);
    const double S = S_of_h_general(0.923, p, kin);
    CHECK(S > 0.0);
    CHECK(S < 5.0);
    CHECK(std::abs(S - 2.118) <= 2e-3);
    CHECK_THROWS_AS(S_of_h_general(-1.0, p, kin), std::domain_error);
}

TEST_CASE("reduction finds the unique equilibrium at S* = 5") {
    const ReductionResult res =
        find_equilibrium_reduction(reference_params(5.0), reference_kinetics());
    REQUIRE(res.points.size() == 1);
    const EquilibriumPoint& eq = res.points.front();
    CHECK(std::abs(eq.h_star - 0.923) <= 2e-3);
    CHECK(std::abs(eq.S_star - 2.118) <= 2e-3);
    CHECK(std::abs(eq.Q_star - 0.518) <= 2e-3);
    CHECK(eq.method == EquilibriumMethod::Reduction);

    // necessary conditions at the returned point
    CHECK(eq.S_star < 5.0);
    CHECK(eq.Delta > 1.0);  // Delta > alpha
    const double q_residual =
        eq.Q_star - 1.0 * eval_d(reference_kinetics(), eq.h_star) * eq.h_star / eq.Delta;
    CHECK(std::abs(q_residual) <= 1e-10);
    CHECK(eq.residuals.maxCoeff() <= 1e-8);
}

TEST_CASE("reduction reports failed existence conditions at S* = 0.5") {
    const ReductionResult res =
        find_equilibrium_reduction(reference_params(0.5), reference_kinetics());
    CHECK(res.points.empty());
    CHECK(res.diagnostic.find("(n2)") != std::string::npos);
}

TEST_CASE("shooting initial value problem") {
    const ModelParams p = reference_params(5.0);

    SUBCASE("mu = 0 freezes the profile") {
        const ShootingSolution sol = shoot_profile(0.0, 2.0, reference_kinetics(), p);
        for (const auto& s : sol.states) {
            CHECK(s.c == 0.0);
            CHECK(s.w >= 1.0);
        }
    }

    SUBCASE("linear r: c and w are cosh") {
        KineticsSet lin = reference_kinetics();
        lin.r = LinearLaw{1.0};
        const ShootingSolution sol = shoot_profile(1.0, 2.0, lin, p);
        for (std::size_t i = 0; i < sol.z.size(); ++i) {
            CHECK(std::abs(sol.states[i].c - std::cosh(sol.z[i])) <= 1e-8);
            CHECK(std::abs(sol.states[i].w - std::cosh(sol.z[i])) <= 1e-8);
            CHECK(std::abs(sol.states[i].cz - std::sinh(sol.z[i])) <= 1e-8);
        }
    }

    SUBCASE("monotonicity for Monod r") {
        const ShootingSolution sol = shoot_profile(1.0, 3.0, reference_kinetics(), p);
        for (std::size_t i = 0; i + 1 < sol.z.size(); ++i) {
            CHECK(sol.states[i + 1].c >= sol.states[i].c - 1e-12);
            CHECK(sol.states[i + 1].cz >= sol.states[i].cz - 1e-12);
            CHECK(sol.states[i].w >= 1.0 - 1e-12);
            CHECK(sol.states[i].wz >= -1e-12);
        }
        for (const auto& s : sol.states) CHECK(s.c >= 1.0 - 1e-12);
    }
}

TEST_CASE("thickness cap h_* matches the closed form") {
    const double hc = h_star_cap(reference_params(5.0), reference_kinetics());
    CHECK(std::abs(hc - kHStarCap) <= 1e-10);
    CHECK(std::abs(hc - 1.6225) <= 1e-3);
}

TEST_CASE("S_of_h_shooting endpoints, monotonicity, and the published point") {
    const ModelParams p = reference_params(5.0);
    const KineticsSet kin = reference_kinetics();
    CHECK(S_of_h_shooting(0.0, p, kin) == 5.0);
    const double hc = h_star_cap(p, kin);
    CHECK(std::abs(S_of_h_shooting(hc, p, kin)) <= 1e-10);
    CHECK(std::abs(S_of_h_shooting(0.923, p, kin) - 2.118) <= 2e-3);

    double prev = S_of_h_shooting(0.0, p, kin);
    for (int i = 1; i < 64; ++i) {
        const double h = hc * i / 63.0;
        const double S = S_of_h_shooting(h, p, kin);
        CHECK(S < prev);
        prev = S;
    }
}

TEST_CASE("h_of_mu endpoints, identity, and monotonicity") {
    const ModelParams p = reference_params(5.0);
    const KineticsSet kin = reference_kinetics();
    const double hc = h_star_cap(p, kin);
    CHECK(h_of_mu(0.0, p, kin) == doctest::Approx(hc).epsilon(1e-12));
    CHECK(h_of_mu(5.0, p, kin) == 0.0);

    double prev = h_of_mu(0.0, p, kin);
    for (int i = 1; i < 64; ++i) {
        const double mu = 5.0 * i / 63.0;
        const double h = h_of_mu(mu, p, kin);
        CHECK(h < prev);
        prev = h;
        if (i % 8 == 0 && mu < 5.0) {
            // defining identity c(h(mu), mu) = S(h(mu))
            const double lhs = shoot_at(mu, h, kin, p).c;
            const double rhs = S_of_h_shooting(h, p, kin);
            CHECK(std::abs(lhs - rhs) <= 1e-10);
        }
    }
}

TEST_CASE("mu_underline brackets and value") {
    const ModelParams p = reference_params(5.0);
    const KineticsSet kin = reference_kinetics();
    const double hc = h_star_cap(p, kin);
    const double mu_bar = mu_underline(p, kin);
    CHECK(mu_bar > 0.0);
    CHECK(mu_bar < 5.0);

    // M(0, 0) = a b + k2 d(h_*) / (alpha + k2), with the reference numbers
    const double m00 = 2.0 + 2.0 * hc / 3.0;
    CHECK(std::abs(m00 - 3.0817) <= 1e-3);
    // M(0, S*) = -a (r(S*) - b) = -4/3 for d(0) = 0
    // both are exercised inside mu_underline's sign assertions
}

TEST_CASE("shooting defect B: endpoints and sign structure") {
    const ModelParams p = reference_params(5.0);
    const KineticsSet kin = reference_kinetics();
    const double B0 = shooting_defect(0.0, p, kin);
    // B(0) = -(a kappa / rho) D S* = -5 exactly at the reference values
    CHECK(std::abs(B0 + 5.0) <= 1e-9);
    const double BS = shooting_defect(5.0, p, kin);
    CHECK(std::abs(BS) <= 1e-9);

    // strictly increasing below mu_underline
    const double mu_bar = mu_underline(p, kin);
    double prev = B0;
    for (int i = 1; i < 64; ++i) {
        const double mu = (mu_bar - 1e-6) * i / 63.0;
        const double B = shooting_defect(mu, p, kin);
        CHECK(B > prev);
        prev = B;
    }
}

TEST_CASE("shooting finder: published equilibrium and consistency") {
    const ModelParams p = reference_params(5.0);
    const KineticsSet kin = reference_kinetics();
    const EquilibriumPoint eq = find_equilibrium_shooting(p, kin);
    CHECK(std::abs(eq.h_star - 0.923) <= 2e-3);
    CHECK(std::abs(eq.S_star - 2.118) <= 2e-3);
    CHECK(std::abs(eq.Q_star - 0.518) <= 2e-3);
    CHECK(eq.method == EquilibriumMethod::Shooting);
    CHECK(eq.residuals.maxCoeff() <= 1e-8);

    const double mu_star = eq.c_star.u0();
    const double mu_bar = mu_underline(p, kin);
    CHECK(mu_star <= mu_bar + 1e-8);

    // profile consistency: the shooting solution evaluated at z = y h_star
    // matches the boundary-value profile
    for (int i = 0; i <= eq.c_star.n(); i += 64) {
        const double y = eq.c_star.grid(i);
        const ShootingState s = shoot_at(mu_star, y * eq.h_star, kin, p);
        CHECK(std::abs(s.c - eq.c_star.u(i)) <= 1e-8);
    }
}

TEST_CASE("reduction and shooting agree to 1e-8 across inlet levels") {
    for (double sstar : {3.0, 4.0, 5.0, 8.0}) {
        const ModelParams p = reference_params(sstar);
        const KineticsSet kin = reference_kinetics();
        const EquilibriumPoint shoot = find_equilibrium_shooting(p, kin);
        const ReductionResult red = find_equilibrium_reduction(p, kin);
        REQUIRE(red.points.size() >= 1);
        const EquilibriumPoint& r = red.points.front();
        CHECK(close_rel(r.h_star, shoot.h_star, 1e-8));
        CHECK(close_rel(r.S_star, shoot.S_star, 1e-8));
        CHECK(close_rel(r.Q_star, shoot.Q_star, 1e-8));
        CHECK(std::abs(r.c_star.u0() - shoot.c_star.u0()) <= 1e-8);
    }
}

TEST_CASE("net-growth integral identity at returned equilibria") {
    // int_0^1 g(r(u)) dy = (k2 - nu(S)) d(h) / Delta at any stationary point
    const ModelParams p = reference_params(5.0);
    const KineticsSet kin = reference_kinetics();
    const EquilibriumPoint from_shooting = find_equilibrium_shooting(p, kin);
    const EquilibriumPoint from_reduction =
        find_equilibrium_reduction(p, kin).points.front();
    for (const EquilibriumPoint* eq : {&from_shooting, &from_reduction}) {
        const int n = eq->c_star.n();
        Eigen::VectorXd gr(n + 1);
        for (int i = 0; i <= n; ++i) gr(i) = eval_g(kin, eval_r(kin, eq->c_star.u(i)));
        const double lhs = integral(gr, 1.0 / n);
        const double rhs =
            (p.k2() - eval_nu(kin, eq->S_star)) * eval_d(kin, eq->h_star) / eq->Delta;
        CHECK(std::abs(lhs - rhs) <= 1e-8);
    }
}

TEST_CASE("shooting machinery requires (NT)") {
    KineticsSet kin = reference_kinetics();
    kin.d = ConstantLaw{1.0};  // (h1) fails: d not strictly increasing
    const ModelParams p = reference_params(5.0);
    CHECK_THROWS_AS(find_equilibrium_shooting(p, kin), PreconditionError);
    CHECK_THROWS_AS(S_of_h_shooting(0.5, p, kin), PreconditionError);
    CHECK_THROWS_AS(h_star_cap(p, kin), PreconditionError);
}
