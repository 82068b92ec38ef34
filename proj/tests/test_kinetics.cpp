#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cstrbio/assumptions.hpp"
#include "helpers.hpp"

using namespace cstrbio;
using namespace cstrbio::testing;

TEST_CASE("rate law point values") {
    const KineticsSet kin = reference_kinetics();
    CHECK(eval_r(kin, 0.5) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(eval_r(kin, 5.0) == doctest::Approx(10.0 / 3.0).epsilon(1e-14));
    CHECK(eval_r(kin, 0.0) == 0.0);
    CHECK(eval_nu(kin, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(eval_nu(kin, 0.0) == 0.0);
    CHECK(eval_g(kin, 10.0 / 3.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(eval_d(kin, 0.0) == 0.0);
    CHECK(eval_d(kin, 2.5) == 2.5);

    KineticsSet lin = kin;
    lin.r = LinearLaw{2.0};
    CHECK(eval_r(lin, 0.0) == 0.0);
    CHECK(eval_r(lin, 1.5) == 3.0);
    CHECK(eval_r_prime(lin, 7.0) == 2.0);

    KineticsSet cd = kin;
    cd.d = ConstantLaw{0.7};
    CHECK(eval_d(cd, 0.0) == 0.7);
    CHECK(eval_d_prime(cd, 3.0) == 0.0);
}

TEST_CASE("negative arguments are rejected") {
    const KineticsSet kin = reference_kinetics();
    CHECK_THROWS_AS(eval_r(kin, -0.1), std::domain_error);
    CHECK_THROWS_AS(eval_r_prime(kin, -1e-9), std::domain_error);
    CHECK_THROWS_AS(eval_nu(kin, -2.0), std::domain_error);
    CHECK_THROWS_AS(eval_g(kin, -0.5), std::domain_error);
    CHECK_THROWS_AS(eval_d(kin, -0.5), std::domain_error);
}

TEST_CASE("parameter validation") {
    ModelParams p = reference_params(5.0);
    CHECK_NOTHROW(p.validate());
    CHECK(p.k2() == 2.0);
    p.kQ = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    KineticsSet k = reference_kinetics();
    CHECK_NOTHROW(k.validate());
    k.g = AffineLaw{1.0, 0.0};
    CHECK_THROWS_AS(k.validate(), std::invalid_argument);
}

TEST_CASE("assumption report, reference set at S* = 5") {
    const AssumptionReport rep =
        validate_assumptions(reference_params(5.0), reference_kinetics());
    CHECK(rep.g0.holds);
    CHECK(rep.g1.holds);
    CHECK(rep.g2.holds);
    CHECK(rep.gg.holds);
    CHECK(rep.h1.holds);
    // k2 = 2 > nu(5) = 5/3 and g(r(5)) (alpha+k2-nu(5)) = 16/9 > 0
    CHECK(rep.h2.holds);
    CHECK(rep.h3a.holds);
    CHECK(rep.h3b.holds);
    // max{1/2, 2/3, 1/3} = 2/3 <= 1 <= 6/5
    CHECK(rep.hh3.holds);
    CHECK(rep.n1.holds);
    CHECK(rep.n2.holds);
    CHECK_FALSE(rep.s1.holds);
    CHECK_FALSE(rep.s2.holds);
    CHECK(rep.nt());
    CHECK_FALSE(rep.global_washout.holds);

    const std::string text = render_assumption_report(rep);
    CHECK(text.find("(hh3)") != std::string::npos);
    CHECK(text.find("(S1)") != std::string::npos);
}

TEST_CASE("assumption report, reference set at S* = 0.5") {
    const AssumptionReport rep =
        validate_assumptions(reference_params(0.5), reference_kinetics());
    CHECK(rep.s1.holds);
    CHECK(rep.s2.holds);
    CHECK(rep.global_washout.holds);  // washout locally and globally stable
    CHECK_FALSE(rep.n2.holds);        // no nontrivial equilibrium
    CHECK(rep.h1.holds);
    CHECK_FALSE(rep.h2.holds);
}

TEST_CASE("constant detachment fails (h1)") {
    KineticsSet kin = reference_kinetics();
    kin.d = ConstantLaw{1.0};
    const AssumptionReport rep = validate_assumptions(reference_params(5.0), kin);
    CHECK_FALSE(rep.h1.holds);
    CHECK_FALSE(rep.nt());
}

TEST_CASE("family properties over random arguments") {
    std::mt19937 rng(20240811);
    const double sstar = 5.0;
    std::uniform_real_distribution<double> arg(0.0, 2.0 * sstar);

    std::vector<KineticsSet> sets;
    sets.push_back(reference_kinetics());
    {
        KineticsSet lin = reference_kinetics();
        lin.r = LinearLaw{1.7};
        sets.push_back(lin);
    }
    {
        KineticsSet cd = reference_kinetics();
        cd.d = ConstantLaw{0.8};
        sets.push_back(cd);
    }

    for (const auto& kin : sets) {
        for (int i = 0; i < 1000; ++i) {
            const double s = arg(rng);
            const double t = arg(rng);
            const double lo = std::min(s, t), hi = std::max(s, t);
            CHECK(eval_r(kin, lo) <= eval_r(kin, hi) + 1e-14);
            CHECK(eval_nu(kin, lo) <= eval_nu(kin, hi) + 1e-14);
            if (s > 0.0) CHECK(s * eval_r(kin, s) > 0.0);

            // finite-difference derivative vs eval_*_prime
            const double eps = 1e-6;
            auto fd_check = [&](auto f, auto fp) {
                const double x = std::max(s, eps);
                const double fd = (f(kin, x + eps) - f(kin, x - eps)) / (2.0 * eps);
                const double ex = fp(kin, x);
                CHECK(std::abs(fd - ex) <= 1e-6 * std::max(1.0, std::abs(ex)));
            };
            fd_check([](const KineticsSet& k, double x) { return eval_r(k, x); },
                     [](const KineticsSet& k, double x) { return eval_r_prime(k, x); });
            fd_check([](const KineticsSet& k, double x) { return eval_nu(k, x); },
                     [](const KineticsSet& k, double x) { return eval_nu_prime(k, x); });
            fd_check([](const KineticsSet& k, double x) { return eval_d(k, x); },
                     [](const KineticsSet& k, double x) { return eval_d_prime(k, x); });
        }
    }
}

TEST_CASE("(h3b): grid check agrees with the Monod criterion") {
    // The closed-form criterion (mu_nu != alpha + k2) and the 1024-point grid
    // check must agree wherever the expression is defined on [0, S*], i.e.
    // alpha + k2 > nu(S*). Near-degenerate draws (|alpha+k2-mu_nu| < 0.05)
    // are resampled: there the grid differences drop below its tolerance.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int tested = 0;
    while (tested < 100) {
        ModelParams p = reference_params(0.5 + 7.5 * u01(rng));
        p.alpha = 0.1 + 2.9 * u01(rng);
        p.D = 0.1 + 2.9 * u01(rng);
        p.kQ = 0.1 + 2.9 * u01(rng);
        KineticsSet kin = reference_kinetics();
        const double mu_nu = 0.5 + 3.5 * u01(rng);
        const double K_nu = 0.2 + 2.8 * u01(rng);
        kin.nu = MonodLaw{mu_nu, K_nu};
        const double ak2 = p.alpha + p.k2();
        if (std::abs(ak2 - mu_nu) < 0.05) continue;
        if (ak2 <= eval_nu(kin, p.sstar)) continue;
        CHECK(h3b_grid_check(p, kin) == h3b_analytic_monod(p, kin));
        ++tested;
    }
}
