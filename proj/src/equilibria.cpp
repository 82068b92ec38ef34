#include "cstrbio/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cstrbio/assumptions.hpp"
#include "cstrbio/dynamics.hpp"
#include "cstrbio/quadrature.hpp"
#include "cstrbio/rk45.hpp"
#include "cstrbio/roots.hpp"

namespace cstrbio {

namespace {

constexpr double kVerdictMargin = 1e-10;

Eigen::Vector3d stationarity_residuals(double h, double S, double Q,
                                       const ModelParams& params, const KineticsSet& kin,
                                       const BvpOptions& bvp) {
    const Eigen::Vector3d f = rhs({0.0, h, S, Q}, kin, params, bvp);
    return f.cwiseAbs();
}

EquilibriumPoint make_point(double h, double S, const ModelParams& params,
                            const KineticsSet& kin, EquilibriumMethod method,
                            const BvpOptions& bvp) {
    EquilibriumPoint eq;
    eq.h_star = h;
    eq.S_star = S;
    eq.Delta = params.alpha + params.k2() - eval_nu(kin, S);
    eq.Q_star = params.beta * eval_d(kin, h) * h / eq.Delta;
    eq.c_star = solve_profile(h, S, kin, params, bvp);
    eq.method = method;
    eq.residuals = stationarity_residuals(h, S, eq.Q_star, params, kin, bvp);
    return eq;
}

// E(h, S) = D S + (rho h / kappa) int_0^1 r(u[h,S]) dy
//         + k1 beta nu(S) d(h) h / (alpha + k2 - nu(S)),
// strictly increasing in S; E(h, S(h)) = D S* defines the reduction curve.
struct ReductionCurve {
    const ModelParams& params;
    const KineticsSet& kin;
    BvpOptions bvp;
    Eigen::VectorXd warm;

    double E(double h, double S) {
        const SubstrateProfile prof = solve_profile(h, S, kin, params, bvp, warm);
        warm = prof.u;
        const double den = params.alpha + params.k2() - eval_nu(kin, S);
        return params.D * S + boundary_flux_term(prof, params) +
               params.k1 * params.beta * eval_nu(kin, S) * eval_d(kin, h) * h / den;
    }

    double S_of_h(double h, double root_tol) {
        if (h == 0.0) return params.sstar;
        const double target = params.D * params.sstar;
        if (E(h, params.sstar) < target)
            throw InfeasibleError("S_of_h_general: E(h, S*) < D S*");
        // E(h, 0) = 0 < D S*, E strictly increasing in S
        return brent([&](double S) { return E(h, S) - target; }, 0.0, params.sstar,
                     {root_tol, 200});
    }

    // GG(h) = int_0^1 g(r(u[h, S(h)])) dy - d(h) (1 - alpha / (alpha+k2-nu(S(h))))
    double GG(double h, double root_tol) {
        const double S = S_of_h(h, root_tol);
        const SubstrateProfile prof = solve_profile(h, S, kin, params, bvp, warm);
        warm = prof.u;
        const int n = prof.n();
        Eigen::VectorXd gr(n + 1);
        for (int i = 0; i <= n; ++i) gr(i) = eval_g(kin, eval_r(kin, prof.u(i)));
        const double den = params.alpha + params.k2() - eval_nu(kin, S);
        return integral(gr, 1.0 / n) -
               eval_d(kin, h) * (1.0 - params.alpha / den);
    }
};

// F(h, S) of the shooting reduction; closed form, no profile solve.
double F_shooting(double h, double S, const ModelParams& params, const KineticsSet& kin) {
    const auto& g = affine_net_growth(kin);
    const double den = params.alpha + params.k2() - eval_nu(kin, S);
    const double bracket = (params.k1 * params.beta - params.rho / (g.gain * params.kappa)) *
                               eval_nu(kin, S) +
                           params.rho * params.k2() / (g.gain * params.kappa);
    return params.D * S + params.rho * g.offset * h / params.kappa +
           eval_d(kin, h) * h / den * bracket;
}

struct ShootCtx {
    const ModelParams& params;
    const KineticsSet& kin;
    double hcap;
};

double h_star_cap_impl(const ModelParams& params, const KineticsSet& kin) {
    const double target = params.D * params.sstar;
    auto f = [&](double h) { return F_shooting(h, 0.0, params, kin) - target; };
    const auto [lo, hi] = expand_bracket(f, 1.0);
    return brent(f, lo, hi, {1e-14, 200});
}

double S_of_h_impl(const ShootCtx& ctx, double h) {
    const ModelParams& p = ctx.params;
    if (h < 0.0) throw std::domain_error("S_of_h_shooting: h must be >= 0");
    if (h == 0.0) return p.sstar;
    const double target = p.D * p.sstar;
    auto f = [&](double S) { return F_shooting(h, S, p, ctx.kin) - target; };
    const double f0 = f(0.0);
    if (f0 >= 0.0) return 0.0;  // at or beyond the cap h_*
    const double f1 = f(p.sstar);
    if (f1 <= 0.0)
        throw ModelViolationError("S_of_h_shooting: F(h, S*) <= D S*");
    // F(h, .) crosses D S* exactly once: either d_S F > 0 under (h3a), or
    // F(h, .) is strictly convex/concave under (h3b); either way the
    // opposite endpoint signs admit a plain bracketing search.
    return brent(f, 0.0, p.sstar, {1e-13, 200});
}

void shooting_rhs(const KineticsSet& kin, double kappa, const Eigen::Vector4d& y,
                  Eigen::Vector4d& dy) {
    const double c = std::max(y(0), 0.0);
    dy(0) = y(1);
    dy(1) = eval_r(kin, c) / kappa;
    dy(2) = y(3);
    dy(3) = eval_r_prime(kin, c) * y(2) / kappa;
}

ShootingState shoot_at_impl(const ShootCtx& ctx, double mu, double z,
                            const ShootOptions& opts) {
    Eigen::Vector4d y0{mu, 0.0, 1.0, 0.0};
    if (z <= 0.0) return {mu, 0.0, 1.0, 0.0};
    auto f = [&](double, const Eigen::Vector4d& y) {
        Eigen::Vector4d dy;
        shooting_rhs(ctx.kin, ctx.params.kappa, y, dy);
        return dy;
    };
    const Eigen::Vector4d yz = integrate_adaptive(f, 0.0, y0, z, opts.rtol, opts.atol,
                                                  [](double, const Eigen::Vector4d&) {});
    return {yz(0), yz(1), yz(2), yz(3)};
}

double h_of_mu_impl(const ShootCtx& ctx, double mu, const ShootOptions& opts) {
    const double sstar = ctx.params.sstar;
    if (mu < 0.0 || mu > sstar)
        throw std::domain_error("h_of_mu: mu must lie in [0, S*]");
    if (mu == 0.0) return ctx.hcap;
    if (mu == sstar) return 0.0;
    auto A = [&](double z) {
        return shoot_at_impl(ctx, mu, z, opts).c - S_of_h_impl(ctx, z);
    };
    const double a0 = mu - sstar;  // A(0)
    const double a1 = A(ctx.hcap);
    if (!(a0 < 0.0) || !(a1 > 0.0))
        throw ModelViolationError("h_of_mu: bracket A(0) < 0 < A(h_*) failed");
    return brent(A, 0.0, ctx.hcap, {1e-13, 200});
}

double M0_impl(const ShootCtx& ctx, double mu, const ShootOptions& opts) {
    const double h = h_of_mu_impl(ctx, mu, opts);
    const double S = S_of_h_impl(ctx, h);
    const auto& g = affine_net_growth(ctx.kin);
    const double k2 = ctx.params.k2();
    const double nu_S = eval_nu(ctx.kin, S);
    return -g.gain * (eval_r(ctx.kin, mu) - g.offset) +
           (k2 - nu_S) / (ctx.params.alpha + k2 - nu_S) * eval_d(ctx.kin, h);
}

double B_impl(const ShootCtx& ctx, double mu, const ShootOptions& opts) {
    const double h = h_of_mu_impl(ctx, mu, opts);
    const ShootingState s = shoot_at_impl(ctx, mu, h, opts);
    const double S = S_of_h_impl(ctx, h);
    const auto& g = affine_net_growth(ctx.kin);
    const double k2 = ctx.params.k2();
    const double nu_S = eval_nu(ctx.kin, S);
    return g.gain * ctx.params.kappa * s.cz - g.gain * g.offset * h -
           (k2 - nu_S) / (ctx.params.alpha + k2 - nu_S) * eval_d(ctx.kin, h) * h;
}

ShootCtx make_shoot_ctx(const ModelParams& params, const KineticsSet& kin) {
    params.validate();
    kin.validate();
    const AssumptionReport rep = validate_assumptions(params, kin);
    if (!rep.nt()) {
        std::string why = "shooting construction requires (NT):";
        if (!rep.h1.holds) why += " (h1) fails [" + rep.h1.detail + "];";
        if (!rep.h2.holds) why += " (h2) fails [" + rep.h2.detail + "];";
        if (!rep.h3a.holds && !rep.h3b.holds)
            why += " both (h3a) and (h3b) fail;";
        throw PreconditionError(why);
    }
    return {params, kin, h_star_cap_impl(params, kin)};
}

} // namespace

WashoutReport washout_analysis(const ModelParams& params, const KineticsSet& kin) {
    params.validate();
    kin.validate();
    WashoutReport rep;
    const double sstar = params.sstar;
    const double k2 = params.k2();
    const double r_s = eval_r(kin, sstar);
    const double nu_s = eval_nu(kin, sstar);
    const double d0 = eval_d(kin, 0.0);
    const double g_rs = eval_g(kin, r_s);

    rep.p = g_rs - d0;
    rep.q = nu_s - k2 - params.alpha;
    rep.jacobian << rep.p, 0.0, params.alpha / params.beta,
        -params.rho / params.kappa * r_s, -params.D, -params.k1 * nu_s,
        params.beta * d0, 0.0, rep.q;

    rep.lambda0 = -params.D;
    const double disc = std::sqrt((rep.p - rep.q) * (rep.p - rep.q) + 4.0 * params.alpha * d0);
    rep.lambda_plus = 0.5 * (rep.p + rep.q + disc);
    rep.lambda_minus = 0.5 * (rep.p + rep.q - disc);

    rep.s1_holds = d0 * (nu_s - k2) < g_rs * (nu_s - k2 - params.alpha);
    rep.s2_holds = nu_s - k2 - params.alpha < d0 - g_rs;

    if (rep.lambda_plus < -kVerdictMargin)
        rep.local_verdict = LocalVerdict::Stable;
    else if (rep.lambda_plus > kVerdictMargin)
        rep.local_verdict = LocalVerdict::Unstable;
    else
        rep.local_verdict = LocalVerdict::Marginal;

    // g and nu are nondecreasing and d(x) >= d(0) for every shipped family,
    // so the global-stability hypotheses reduce to (S1) and nu(S*) < k2.
    rep.global_verdict = (rep.s1_holds && nu_s < k2) ? GlobalVerdict::GloballyStable
                                                     : GlobalVerdict::Unknown;
    return rep;
}

double S_of_h_general(double h, const ModelParams& params, const KineticsSet& kin,
                      const BvpOptions& bvp, double root_tol) {
    if (h < 0.0) throw std::domain_error("S_of_h_general: h must be >= 0");
    ReductionCurve curve{params, kin, bvp, {}};
    return curve.S_of_h(h, root_tol);
}

ReductionResult find_equilibrium_reduction(const ModelParams& params, const KineticsSet& kin,
                                           const ReductionScanOptions& opts) {
    params.validate();
    kin.validate();
    ReductionResult result;
    const AssumptionReport rep = validate_assumptions(params, kin);
    if (!rep.n1.holds || !rep.n2.holds) {
        result.diagnostic = "existence conditions fail:";
        if (!rep.n1.holds) result.diagnostic += " (n1) [" + rep.n1.detail + "]";
        if (!rep.n2.holds) result.diagnostic += " (n2) [" + rep.n2.detail + "]";
        return result;
    }

    const double k2 = params.k2();
    const double GG0 = eval_g(kin, eval_r(kin, params.sstar)) -
                       eval_d(kin, 0.0) *
                           (1.0 - params.alpha /
                                      (params.alpha + k2 - eval_nu(kin, params.sstar)));
    if (!(GG0 > 0.0))
        throw ModelViolationError("find_equilibrium_reduction: GG(0) <= 0 despite (n2)");

    double cap = opts.fallback_cap;
    if (rep.nt()) cap = opts.cap_factor * h_star_cap_impl(params, kin);

    ReductionCurve curve{params, kin, opts.bvp, {}};
    auto GG = [&](double h) {
        return (h == 0.0) ? GG0 : curve.GG(h, opts.root_tol);
    };

    std::vector<double> grid;
    grid.push_back(0.0);
    for (double h = opts.h_min; h < cap; h *= opts.growth) grid.push_back(h);
    grid.push_back(cap);

    double prev_h = grid[0];
    double prev_val = GG0;
    bool truncated = false;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double val;
        try {
            val = GG(grid[i]);
        } catch (const SolverError& e) {
            if (result.points.empty()) throw;
            result.diagnostic += "scan truncated at h=" + std::to_string(grid[i]) + ": " +
                                 e.what();
            truncated = true;
            break;
        }
        if (val == 0.0) {
            result.points.push_back(
                make_point(grid[i], curve.S_of_h(grid[i], opts.root_tol), params, kin,
                           EquilibriumMethod::Reduction, opts.bvp));
        } else if (prev_val * val < 0.0) {
            const double h_root = brent([&](double h) { return GG(h); }, prev_h, grid[i],
                                        {opts.root_tol, 200});
            result.points.push_back(make_point(h_root, curve.S_of_h(h_root, opts.root_tol),
                                               params, kin, EquilibriumMethod::Reduction,
                                               opts.bvp));
        }
        prev_h = grid[i];
        prev_val = val;
    }
    if (result.points.empty() && !truncated)
        throw NoEquilibriumError(
            "find_equilibrium_reduction: no sign change of GG(h) up to the scan cap");
    return result;
}

ShootingSolution shoot_profile(double mu, double z_max, const KineticsSet& kin,
                               const ModelParams& params, const ShootOptions& opts) {
    if (mu < 0.0 || mu > params.sstar)
        throw std::domain_error("shoot_profile: mu must lie in [0, S*]");
    if (!(z_max > 0.0)) throw std::invalid_argument("shoot_profile: z_max must be > 0");
    ShootingSolution sol;
    sol.mu = mu;
    auto f = [&](double, const Eigen::Vector4d& y) {
        Eigen::Vector4d dy;
        shooting_rhs(kin, params.kappa, y, dy);
        return dy;
    };
    const Eigen::Vector4d y0{mu, 0.0, 1.0, 0.0};
    integrate_adaptive(f, 0.0, y0, z_max, opts.rtol, opts.atol,
                       [&](double z, const Eigen::Vector4d& y) {
                           sol.z.push_back(z);
                           sol.states.push_back({y(0), y(1), y(2), y(3)});
                       });
    return sol;
}

ShootingState shoot_at(double mu, double z, const KineticsSet& kin, const ModelParams& params,
                       const ShootOptions& opts) {
    if (mu < 0.0 || mu > params.sstar)
        throw std::domain_error("shoot_at: mu must lie in [0, S*]");
    if (z < 0.0) throw std::domain_error("shoot_at: z must be >= 0");
    ShootCtx ctx{params, kin, 0.0};
    return shoot_at_impl(ctx, mu, z, opts);
}

double h_star_cap(const ModelParams& params, const KineticsSet& kin) {
    make_shoot_ctx(params, kin);  // enforce (gg) and (NT)
    return h_star_cap_impl(params, kin);
}

double S_of_h_shooting(double h, const ModelParams& params, const KineticsSet& kin) {
    const ShootCtx ctx = make_shoot_ctx(params, kin);
    return S_of_h_impl(ctx, h);
}

double h_of_mu(double mu, const ModelParams& params, const KineticsSet& kin,
               const ShootOptions& opts) {
    const ShootCtx ctx = make_shoot_ctx(params, kin);
    return h_of_mu_impl(ctx, mu, opts);
}

double mu_underline(const ModelParams& params, const KineticsSet& kin,
                    const ShootOptions& opts) {
    const ShootCtx ctx = make_shoot_ctx(params, kin);
    const double m_at_0 = M0_impl(ctx, 0.0, opts);
    const double m_at_sstar = M0_impl(ctx, params.sstar, opts);
    if (!(m_at_0 > 0.0) || !(m_at_sstar < 0.0))
        throw ModelViolationError("mu_underline: sign assertions M(0,0) > 0 > M(0,S*) failed");
    return brent([&](double mu) { return M0_impl(ctx, mu, opts); }, 0.0, params.sstar,
                 {1e-12, 200});
}

double shooting_defect(double mu, const ModelParams& params, const KineticsSet& kin,
                       const ShootOptions& opts) {
    const ShootCtx ctx = make_shoot_ctx(params, kin);
    return B_impl(ctx, mu, opts);
}

EquilibriumPoint find_equilibrium_shooting(const ModelParams& params, const KineticsSet& kin,
                                           const ShootingFindOptions& opts) {
    const ShootCtx ctx = make_shoot_ctx(params, kin);
    const double sstar = params.sstar;

    const double mu_bar = [&] {
        const double m0v = M0_impl(ctx, 0.0, opts.shoot);
        const double m1v = M0_impl(ctx, sstar, opts.shoot);
        if (!(m0v > 0.0) || !(m1v < 0.0))
            throw ModelViolationError("mu_underline: sign assertions failed");
        return brent([&](double mu) { return M0_impl(ctx, mu, opts.shoot); }, 0.0, sstar,
                     {opts.root_tol, 200});
    }();

    const double B0 = B_impl(ctx, 0.0, opts.shoot);
    if (!(B0 < 0.0))
        throw ModelViolationError("find_equilibrium_shooting: B(0) >= 0");

    // B < 0 below mu_* and B > 0 on (mu_underline, S*); scan a uniform grid
    // for the first sign change, then refine.
    const int m = std::max(opts.scan_points, 8);
    double lo = 0.0, lo_val = B0;
    double mu_star = -1.0;
    for (int j = 1; j < m; ++j) {
        const double mu = sstar * j / m;
        const double val = B_impl(ctx, mu, opts.shoot);
        if (val == 0.0) {
            mu_star = mu;
            break;
        }
        if (lo_val < 0.0 && val > 0.0) {
            mu_star = brent([&](double x) { return B_impl(ctx, x, opts.shoot); }, lo, mu,
                            {opts.root_tol, 200});
            break;
        }
        lo = mu;
        lo_val = val;
    }
    if (mu_star < 0.0)
        throw ModelViolationError(
            "find_equilibrium_shooting: B has no sign change below S*");
    if (mu_star > mu_bar + 1e-8)
        throw ModelViolationError("find_equilibrium_shooting: mu_* exceeds mu_underline");

    const double h = h_of_mu_impl(ctx, mu_star, opts.shoot);
    const double S = S_of_h_impl(ctx, h);
    EquilibriumPoint eq = make_point(h, S, params, kin, EquilibriumMethod::Shooting, opts.bvp);
    return eq;
}

} // namespace cstrbio
