#include "cstrbio/substrate_bvp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "cstrbio/quadrature.hpp"

namespace cstrbio {

namespace {

// r and r' flattened for the hot loops. Below zero the law continues as the
// C^1 linear extension r'(0) c: iterates may transiently undershoot, the
// evaluation stays smooth (no Monod pole) and the Jacobian exact, and the
// fixed point itself lies in [0, S].
struct RateEval {
    bool monod;
    double vmax, K, slope;

    explicit RateEval(const KineticsSet& kin) {
        if (const auto* m = std::get_if<MonodLaw>(&kin.r)) {
            monod = true;
            vmax = m->vmax;
            K = m->K;
            slope = m->vmax / m->K;  // r'(0)
        } else {
            monod = false;
            vmax = K = 0.0;
            slope = std::get<LinearLaw>(kin.r).slope;
        }
    }

    double operator()(double c) const {
        if (!monod || c < 0.0) return slope * c;
        return vmax * c / (K + c);
    }

    double prime(double c) const {
        if (!monod || c < 0.0) return slope;
        const double den = K + c;
        return vmax * K / (den * den);
    }
};

void check_options(const BvpOptions& opts) {
    if (opts.n < 8 || opts.n % 2 != 0)
        throw std::invalid_argument("BvpOptions::n must be even and >= 8");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("BvpOptions::tol must be > 0");
}

// Matrix of f |-> int_y^1 int_0^eta f dxi deta on the n+1 node grid,
// cached per grid size.
const Eigen::MatrixXd& double_integral_operator(int n) {
    static std::mutex mtx;
    static std::map<int, Eigen::MatrixXd> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    const double dy = 1.0 / n;
    Eigen::MatrixXd op(n + 1, n + 1);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
    for (int j = 0; j <= n; ++j) {
        e(j) = 1.0;
        const Eigen::VectorXd J = cumulative_integral(cumulative_integral(e, dy), dy);
        op.col(j) = Eigen::VectorXd::Constant(n + 1, J(n)) - J;
        e(j) = 0.0;
    }
    return cache.emplace(n, std::move(op)).first->second;
}

Eigen::VectorXd apply_F(const Eigen::VectorXd& u, double h, double S, double kappa,
                        const RateEval& rate, double dy) {
    Eigen::VectorXd rv(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) rv(i) = rate(u(i));
    const Eigen::VectorXd J = cumulative_integral(cumulative_integral(rv, dy), dy);
    const Eigen::VectorXd tail = Eigen::VectorXd::Constant(u.size(), J(u.size() - 1)) - J;
    return Eigen::VectorXd::Constant(u.size(), S) - (h * h / kappa) * tail;
}

double sup_norm(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

// Newton on u - F(u) = 0 with the dense linearization I + (h^2/k) D2 diag(r'(u)).
// Steps are backtracked on the sup-defect, which keeps strongly nonlinear
// (large h^2 r'/kappa) cold starts from overshooting; the factorization is
// reused while convergence stays fast.
void newton_iterate(Eigen::VectorXd& u, double h, double S, double kappa,
                    const RateEval& rate, const BvpOptions& opts, double& defect) {
    const int n = static_cast<int>(u.size()) - 1;
    const double dy = 1.0 / n;
    const Eigen::MatrixXd& D2 = double_integral_operator(n);
    const double c = h * h / kappa;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    bool have_lu = false;
    bool fresh_lu = false;
    double prev = std::numeric_limits<double>::infinity();
    Eigen::VectorXd Fu = apply_F(u, h, S, kappa, rate, dy);
    defect = sup_norm(u - Fu);
    for (int it = 0; it < opts.max_newton; ++it) {
        if (defect <= opts.tol) return;
        if (!have_lu || (defect > 0.3 * prev && !fresh_lu)) {
            Eigen::VectorXd rpu(u.size());
            for (Eigen::Index i = 0; i < u.size(); ++i) rpu(i) = rate.prime(u(i));
            Eigen::MatrixXd A = c * (D2 * rpu.asDiagonal());
            A.diagonal().array() += 1.0;
            lu.compute(A);
            have_lu = true;
            fresh_lu = true;
        } else {
            fresh_lu = false;
        }
        const Eigen::VectorXd step = lu.solve(Fu - u);
        prev = defect;
        double sigma = 1.0;
        Eigen::VectorXd u_try, F_try;
        double d_try = defect;
        for (int back = 0; back < 30; ++back) {
            u_try = u + sigma * step;
            F_try = apply_F(u_try, h, S, kappa, rate, dy);
            d_try = sup_norm(u_try - F_try);
            if (d_try < (1.0 - 0.25 * sigma) * defect || d_try <= opts.tol) break;
            sigma *= 0.5;
        }
        u = u_try;
        Fu = F_try;
        defect = d_try;
    }
    if (defect > opts.tol)
        throw SolverError("substrate BVP: Newton did not converge", defect);
}

SubstrateProfile finish(double h, double S, Eigen::VectorXd u, double residual,
                        double kappa, const RateEval& rate) {
    SubstrateProfile p;
    p.h = h;
    p.S = S;
    p.u = std::move(u);
    p.residual = residual;
    const int n = static_cast<int>(p.u.size()) - 1;
    Eigen::VectorXd rv(n + 1);
    for (int i = 0; i <= n; ++i) rv(i) = rate(p.u(i));
    p.flux_scaled = (h * h / kappa) * integral(rv, 1.0 / n);
    return p;
}

} // namespace

SubstrateProfile solve_profile(double h, double S, const KineticsSet& kin,
                               const ModelParams& params, const BvpOptions& opts,
                               const Eigen::VectorXd& initial_guess) {
    check_options(opts);
    if (h < 0.0 || S < 0.0)
        throw std::domain_error("solve_profile: h and S must be nonnegative");

    const RateEval rate(kin);
    if (h == 0.0 || S == 0.0) {
        SubstrateProfile p;
        p.h = h;
        p.S = S;
        p.u = Eigen::VectorXd::Constant(opts.n + 1, h == 0.0 ? S : 0.0);
        p.residual = 0.0;
        p.flux_scaled = 0.0;
        return p;
    }

    const double dy = 1.0 / opts.n;
    Eigen::VectorXd u = (initial_guess.size() == opts.n + 1)
                            ? initial_guess
                            : Eigen::VectorXd::Constant(opts.n + 1, S);

    double defect = std::numeric_limits<double>::infinity();
    if (opts.method == SolveMethod::NewtonOnly) {
        newton_iterate(u, h, S, params.kappa, rate, opts, defect);
        return finish(h, S, std::move(u), defect, params.kappa, rate);
    }

    // damped Picard: u <- u + 0.5 (F(u) - u)
    double prev = std::numeric_limits<double>::infinity();
    int stall = 0;
    for (int it = 0; it < opts.max_picard; ++it) {
        const Eigen::VectorXd Fu = apply_F(u, h, S, params.kappa, rate, dy);
        defect = sup_norm(u - Fu);
        if (defect <= opts.tol)
            return finish(h, S, std::move(u), defect, params.kappa, rate);
        stall = (defect > 0.9 * prev) ? stall + 1 : 0;
        if (opts.method == SolveMethod::Auto && stall >= 3) break;
        u = 0.5 * u + 0.5 * Fu;
        prev = defect;
    }
    if (opts.method == SolveMethod::PicardOnly) {
        const Eigen::VectorXd Fu = apply_F(u, h, S, params.kappa, rate, dy);
        defect = sup_norm(u - Fu);
        if (defect <= opts.tol)
            return finish(h, S, std::move(u), defect, params.kappa, rate);
        throw SolverError("substrate BVP: Picard did not converge", defect);
    }
    newton_iterate(u, h, S, params.kappa, rate, opts, defect);
    return finish(h, S, std::move(u), defect, params.kappa, rate);
}

SubstrateProfile solve_profile(double h, double S, const KineticsSet& kin,
                               const ModelParams& params, const BvpOptions& opts) {
    return solve_profile(h, S, kin, params, opts, Eigen::VectorXd());
}

SensitivityProfile solve_sensitivity(const SubstrateProfile& profile, SensitivityKind kind,
                                     const KineticsSet& kin, const ModelParams& params) {
    const int n = profile.n();
    const double dy = 1.0 / n;
    const double h = profile.h;
    const RateEval rate(kin);

    SensitivityProfile out;
    out.kind = kind;
    if (h == 0.0) {
        // d_S u[0,S] = 1 and d_h u[0,S] = 0, both with zero slope
        const double v = (kind == SensitivityKind::dS) ? 1.0 : 0.0;
        out.values = Eigen::VectorXd::Constant(n + 1, v);
        out.dvalues = Eigen::VectorXd::Zero(n + 1);
        return out;
    }

    Eigen::VectorXd rpu(n + 1), rv(n + 1);
    for (int i = 0; i <= n; ++i) {
        rpu(i) = rate.prime(profile.u(i));
        rv(i) = rate(profile.u(i));
    }
    const Eigen::MatrixXd& D2 = double_integral_operator(n);
    const double c = h * h / params.kappa;
    Eigen::MatrixXd A = c * (D2 * rpu.asDiagonal());
    A.diagonal().array() += 1.0;

    Eigen::VectorXd b;
    if (kind == SensitivityKind::dS) {
        b = Eigen::VectorXd::Ones(n + 1);
    } else {
        b = -(2.0 * h / params.kappa) * (D2 * rv);
    }
    out.values = A.partialPivLu().solve(b);

    // phi'(y) = (1/kappa) int_0^y (h^2 r'(u) phi + src)
    Eigen::VectorXd integrand = h * h * rpu.cwiseProduct(out.values);
    if (kind == SensitivityKind::dh) integrand += 2.0 * h * rv;
    out.dvalues = cumulative_integral(integrand, dy) / params.kappa;
    return out;
}

SensitivityIntegrals sensitivity_integrals(const SubstrateProfile& profile,
                                           const KineticsSet& kin, const ModelParams& params) {
    const int n = profile.n();
    const RateEval rate(kin);
    Eigen::VectorXd rpu(n + 1);
    for (int i = 0; i <= n; ++i) rpu(i) = rate.prime(profile.u(i));

    const SensitivityProfile w = solve_sensitivity(profile, SensitivityKind::dS, kin, params);
    const SensitivityProfile v = solve_sensitivity(profile, SensitivityKind::dh, kin, params);

    SensitivityIntegrals out;
    out.G = simpson(rpu.cwiseProduct(w.values), 1.0 / n);
    out.H = simpson(rpu.cwiseProduct(v.values), 1.0 / n);
    return out;
}

double boundary_flux_term(const SubstrateProfile& profile, const ModelParams& params) {
    if (profile.h == 0.0) return 0.0;
    return params.rho / profile.h * profile.flux_scaled;
}

} // namespace cstrbio
