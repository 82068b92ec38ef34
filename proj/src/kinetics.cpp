#include "cstrbio/assumptions.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <sstream>

namespace cstrbio {

namespace {

std::string fmt(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

} // namespace

bool h3b_grid_check(const ModelParams& params, const KineticsSet& kin, int samples,
                    double tol) {
    const double ak2 = params.alpha + params.k2();
    auto value = [&](double S) {
        const double den = ak2 - eval_nu(kin, S);
        if (den <= 0.0) return std::nan("");
        return eval_nu_prime(kin, S) / (den * den);
    };
    const double dS = params.sstar / (samples - 1);
    bool increasing = true, decreasing = true;
    double prev = value(0.0);
    if (std::isnan(prev)) return false;
    for (int i = 1; i < samples; ++i) {
        const double cur = value(i * dS);
        if (std::isnan(cur)) return false;
        if (!(cur > prev + tol)) increasing = false;
        if (!(cur < prev - tol)) decreasing = false;
        if (!increasing && !decreasing) return false;
        prev = cur;
    }
    return increasing || decreasing;
}

bool h3b_analytic_monod(const ModelParams& params, const KineticsSet& kin) {
    const auto& m = std::get<MonodLaw>(kin.nu);
    return params.alpha + params.k2() != m.vmax;
}

AssumptionReport validate_assumptions(const ModelParams& params, const KineticsSet& kin) {
    AssumptionReport rep;
    const double k2 = params.k2();
    const double alpha = params.alpha;
    const double ak2 = alpha + k2;
    const double sstar = params.sstar;

    const auto& gaff = affine_net_growth(kin);
    const double a = gaff.gain;
    const double b = gaff.offset;

    const double nu_s = eval_nu(kin, sstar);
    const double r_s = eval_r(kin, sstar);
    const double g_rs = eval_g(kin, r_s);
    const double d0 = eval_d(kin, 0.0);
    const bool d_strictly_increasing = std::holds_alternative<LinearLaw>(kin.d);

    rep.g0 = {true, "g locally Lipschitz (affine family)"};
    rep.g1 = {true, "r C^1, nondecreasing, r(0)=0, s r(s)>0 for s>0 (family)"};
    rep.g2 = {true, "nu, d C^1-, nu(0)=0, positive for positive argument (family)"};
    rep.gg = {true, fmt("g(s) = a (s - b), a=%g, b=%g", a, b)};

    rep.h1 = {d_strictly_increasing,
              d_strictly_increasing
                  ? "nu nondecreasing (Monod); d strictly increasing (linear)"
                  : "d constant, not strictly increasing"};

    const double h2_lhs = g_rs * (ak2 - nu_s);
    const double h2_rhs = d0 * (k2 - nu_s);
    const bool h2a = k2 > nu_s;
    const bool h2b = h2_lhs > h2_rhs;
    rep.h2 = {h2a && h2b, fmt("k2=%g %s nu(S*)=%g; g(r(S*))(a+k2-nu(S*))=%g %s d(0)(k2-nu(S*))=%g",
                              k2, h2a ? ">" : "<=", nu_s, h2_lhs, h2b ? ">" : "<=", h2_rhs)};

    const double h3a_lhs = alpha / (a * ak2);
    const double h3a_rhs = params.beta * params.k1 * params.kappa / params.rho;
    rep.h3a = {h3a_lhs <= h3a_rhs,
               fmt("alpha/(a(alpha+k2))=%g %s beta k1 kappa/rho=%g", h3a_lhs,
                   h3a_lhs <= h3a_rhs ? "<=" : ">", h3a_rhs)};

    const bool grid = h3b_grid_check(params, kin);
    const bool analytic = h3b_analytic_monod(params, kin);
    rep.h3b = {grid, fmt("grid(1024): %s; analytic mu_nu != alpha+k2: %s",
                         grid ? "strictly monotone" : "not strictly monotone",
                         analytic ? "true" : "false")};

    const double hh3_lo = std::max({1.0 / (2.0 * a), b / ak2, alpha / (a * ak2)});
    const double hh3_hi = (nu_s > 0.0) ? 2.0 * alpha / (a * nu_s)
                                       : std::numeric_limits<double>::infinity();
    rep.hh3 = {hh3_lo <= h3a_rhs && h3a_rhs <= hh3_hi,
               fmt("max{1/(2a), b/(a+k2), a/(a(a+k2))}=%g <= beta k1 kappa/rho=%g <= "
                   "2 alpha/(a nu(S*))=%g: %s",
                   hh3_lo, h3a_rhs, hh3_hi,
                   (hh3_lo <= h3a_rhs && h3a_rhs <= hh3_hi) ? "true" : "false")};

    rep.n1 = {ak2 > nu_s, fmt("alpha+k2=%g %s nu(S*)=%g", ak2, ak2 > nu_s ? ">" : "<=", nu_s)};
    rep.n2 = {h2_lhs > h2_rhs,
              fmt("g(r(S*))(alpha+k2-nu(S*))=%g %s d(0)(k2-nu(S*))=%g", h2_lhs,
                  h2_lhs > h2_rhs ? ">" : "<=", h2_rhs)};

    const double s1_lhs = d0 * (nu_s - k2);
    const double s1_rhs = g_rs * (nu_s - k2 - alpha);
    rep.s1 = {s1_lhs < s1_rhs,
              fmt("d(0)(nu(S*)-k2)=%g %s g(r(S*))(nu(S*)-k2-alpha)=%g", s1_lhs,
                  s1_lhs < s1_rhs ? "<" : ">=", s1_rhs)};
    const double s2_lhs = nu_s - k2 - alpha;
    const double s2_rhs = d0 - g_rs;
    rep.s2 = {s2_lhs < s2_rhs, fmt("nu(S*)-k2-alpha=%g %s d(0)-g(r(S*))=%g", s2_lhs,
                                   s2_lhs < s2_rhs ? "<" : ">=", s2_rhs)};

    // global washout stability: (S1), g and nu nondecreasing (family-given),
    // nu(S*) < k2, d(x) >= d(0) (family-given)
    const bool global = rep.s1.holds && nu_s < k2;
    rep.global_washout = {global, fmt("(S1) %s; nu(S*)=%g %s k2=%g; g, nu nondecreasing; "
                                      "d(x)>=d(0) (family)",
                                      rep.s1.holds ? "true" : "false", nu_s,
                                      nu_s < k2 ? "<" : ">=", k2)};
    return rep;
}

std::string render_assumption_report(const AssumptionReport& report) {
    std::ostringstream out;
    for (const auto& [name, cond] : report.items()) {
        out << name;
        for (std::size_t i = name.size(); i < 10; ++i) out << ' ';
        out << (cond->holds ? "true " : "false") << "  " << cond->detail << "\n";
    }
    out << "(NT)      " << (report.nt() ? "true " : "false")
        << "  h1 and h2 and (h3a or h3b)\n";
    return out.str();
}

} // namespace cstrbio
