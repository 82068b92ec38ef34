#include "cstrbio/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cstrbio/quadrature.hpp"
#include "cstrbio/rk45.hpp"

namespace cstrbio {

namespace {

// Right-hand side with a warm-started profile cache for one integration.
struct RhsCore {
    const KineticsSet& kin;
    const ModelParams& params;
    BvpOptions bvp;
    Eigen::VectorXd warm;
    double last_u0 = 0.0;
    double last_flux = 0.0;

    Eigen::Vector3d operator()(double /*t*/, const Eigen::Vector3d& x) {
        // stage values may undershoot zero by the integrator's slack
        const double h = std::max(x(0), 0.0);
        const double S = std::max(x(1), 0.0);
        const double Q = std::max(x(2), 0.0);
        const SubstrateProfile prof = solve_profile(h, S, kin, params, bvp, warm);
        warm = prof.u;
        last_u0 = prof.u0();
        last_flux = boundary_flux_term(prof, params);

        const int n = prof.n();
        Eigen::VectorXd gr(n + 1);
        for (int i = 0; i <= n; ++i) gr(i) = eval_g(kin, eval_r(kin, prof.u(i)));
        const double g_int = integral(gr, 1.0 / n);

        const double d_h = eval_d(kin, h);
        const double nu_S = eval_nu(kin, S);
        Eigen::Vector3d f;
        f(0) = h * g_int + params.alpha / params.beta * Q - d_h * h;
        f(1) = params.D * (params.sstar - S) - params.k1 * Q * nu_S - last_flux;
        f(2) = (nu_S - params.k2()) * Q + params.beta * d_h * h - params.alpha * Q;
        return f;
    }
};

struct BoundConstants {
    bool applicable = false;
    double eta = 0.0, eta0 = 0.0, eta1 = 0.0, g0 = 0.0, h1 = 0.0, delta = 0.0;
    double cap = 0.0;  ///< ((g0+1) eta h1 + D S*/k1) / delta
};

// Constants of the weighted-mass functional eta h + Q + S/k1, following the
// boundedness argument: eta the midpoint of (beta, (k2+alpha) beta / alpha),
// g0 = max |g| on [0, r(S1)], h1 from eta g0 - eta1 d(h1) = -eta.
BoundConstants bound_constants(const KineticsSet& kin, const ModelParams& params, double S0) {
    BoundConstants c;
    if (!detachment_is_unbounded(kin)) return c;
    c.applicable = true;
    const double k2 = params.k2();
    const double beta = params.beta;
    c.eta = 0.5 * (beta + (k2 + params.alpha) / params.alpha * beta);
    c.eta0 = k2 + params.alpha * (1.0 - c.eta / beta);
    c.eta1 = c.eta - beta;
    const double S1 = std::max(S0, params.sstar);
    const auto& g = affine_net_growth(kin);
    const double r_S1 = eval_r(kin, S1);
    c.g0 = g.gain * std::max(g.offset, std::abs(r_S1 - g.offset));
    const double d0_slope = std::get<LinearLaw>(kin.d).slope;
    c.h1 = c.eta * (c.g0 + 1.0) / (c.eta1 * d0_slope);
    c.delta = std::min({1.0, params.D, c.eta0});
    c.cap = ((c.g0 + 1.0) * c.eta * c.h1 + params.D * params.sstar / params.k1) / c.delta;
    return c;
}

double mass_functional(const BoundConstants& c, double k1, double h, double S, double Q) {
    return c.eta * h + Q + S / k1;
}

void note_violation(MonitorLog& log, const std::string& msg) {
    if (log.violations.size() < 32) log.violations.push_back(msg);
}

} // namespace

Eigen::Vector3d rhs(const ReactorState& state, const KineticsSet& kin,
                    const ModelParams& params, const BvpOptions& opts) {
    if (state.h < 0.0 || state.S < 0.0 || state.Q < 0.0)
        throw std::domain_error("rhs: state components must be nonnegative");
    RhsCore core{kin, params, opts, {}, 0.0, 0.0};
    return core(state.t, Eigen::Vector3d{state.h, state.S, state.Q});
}

Trajectory integrate(const ReactorState& initial, double t_end, const KineticsSet& kin,
                     const ModelParams& params, const IntegrateOptions& opts) {
    if (initial.h < 0.0 || initial.S < 0.0 || initial.Q < 0.0)
        throw std::domain_error("integrate: initial state must be nonnegative");
    if (t_end < 0.0) throw std::invalid_argument("integrate: t_end must be >= 0");
    if (!(opts.sample_dt > 0.0))
        throw std::invalid_argument("integrate: sample_dt must be > 0");

    RhsCore core{kin, params, opts.bvp, {}, 0.0, 0.0};
    Trajectory traj;
    const BoundConstants bc = bound_constants(kin, params, initial.S);
    traj.monitor.bound_monitor_applicable = bc.applicable;
    const double S1 = std::max(initial.S, params.sstar);
    const double V0 =
        bc.applicable ? mass_functional(bc, params.k1, initial.h, initial.S, initial.Q) : 0.0;
    const double Vbound = bc.applicable ? std::max(V0, bc.cap) : 0.0;

    Eigen::Vector3d y{initial.h, initial.S, initial.Q};
    double t = initial.t;
    const double t_stop = initial.t + t_end;

    auto record_sample = [&](double ts, const Eigen::Vector3d& x) {
        traj.samples.push_back({ts, x(0), x(1), x(2), core.last_u0, core.last_flux});
    };
    auto run_monitors = [&](double ts, const Eigen::Vector3d& x) {
        const double s_excess = x(1) - S1;
        traj.monitor.max_S_excess = std::max(traj.monitor.max_S_excess, s_excess);
        if (s_excess > 1e-9)
            note_violation(traj.monitor,
                           "S-bound exceeded at t=" + std::to_string(ts));
        if (bc.applicable) {
            const double excess =
                mass_functional(bc, params.k1, x(0), x(1), x(2)) - Vbound;
            traj.monitor.max_bound_excess = std::max(traj.monitor.max_bound_excess, excess);
            if (excess > 1e-6)
                note_violation(traj.monitor,
                               "mass functional bound exceeded at t=" + std::to_string(ts));
        }
    };

    try {
        Eigen::Vector3d k1v = core(t, y);  // also fills u0/flux for the first sample
        record_sample(t, y);
        run_monitors(t, y);
        if (t_end == 0.0) {
            traj.completed = true;
            return traj;
        }

        long k_sample = 1;
        double next_sample = std::min(initial.t + k_sample * opts.sample_dt, t_stop);
        double dt = std::min(0.01 * t_end, 0.1);
        Eigen::Vector3d y5, err, klast;
        long steps = 0;

        while (t < t_stop) {
            if (++steps > opts.max_steps) {
                traj.completed = false;
                traj.failure_reason = "step budget exhausted";
                return traj;
            }
            const double dt_cap = next_sample - t;
            const bool clipped = dt >= dt_cap;
            const double dt_try = clipped ? dt_cap : dt;
            if (dt_try < 1e-14 * std::max(1.0, std::abs(t))) {
                traj.completed = false;
                traj.failure_reason = "step size underflow";
                return traj;
            }

            dp45_step(core, t, y, dt_try, k1v, y5, err, klast);

            const double floor = y5.minCoeff();
            if (floor < -1e-9) {
                ++traj.monitor.rejected_steps;
                ++traj.monitor.negativity_rejections;
                dt = 0.5 * dt_try;
                continue;
            }

            double enorm = 0.0;
            for (int i = 0; i < 3; ++i) {
                const double sc =
                    opts.atol + opts.rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
                enorm = std::max(enorm, std::abs(err(i)) / sc);
            }
            if (enorm > 1.0) {
                ++traj.monitor.rejected_steps;
                dt = dt_try * std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 1.0);
                continue;
            }

            // accept
            t += dt_try;
            ++traj.monitor.accepted_steps;
            traj.monitor.worst_pre_clamp = std::min(traj.monitor.worst_pre_clamp, floor);
            bool clamped = false;
            for (int i = 0; i < 3; ++i) {
                if (y5(i) < 0.0) {
                    if (y5(i) < -1e-12)
                        note_violation(traj.monitor, "component " + std::to_string(i) +
                                                         " clamped from " +
                                                         std::to_string(y5(i)));
                    y5(i) = 0.0;
                    ++traj.monitor.clamped_components;
                    clamped = true;
                }
            }
            y = y5;
            k1v = clamped ? core(t, y) : klast;  // FSAL unless the state moved
            run_monitors(t, y);

            if (t >= next_sample - 1e-12 * std::max(1.0, std::abs(next_sample))) {
                record_sample(next_sample, y);
                ++k_sample;
                next_sample = std::min(initial.t + k_sample * opts.sample_dt, t_stop);
                if (traj.samples.back().t >= t_stop) break;
            }
            if (!clipped) {
                const double fac =
                    (enorm > 0.0) ? std::clamp(0.9 * std::pow(enorm, -0.2), 0.2, 5.0) : 5.0;
                dt = dt_try * fac;
            }
        }
        traj.completed = true;
        return traj;
    } catch (const SolverError& e) {
        traj.completed = false;
        traj.failure_reason = e.what();
        return traj;
    }
}

BoundReport orbit_bound_monitor(const Trajectory& traj, const KineticsSet& kin,
                                const ModelParams& params) {
    BoundReport rep;
    if (traj.samples.empty())
        throw std::invalid_argument("orbit_bound_monitor: empty trajectory");
    const BoundConstants bc = bound_constants(kin, params, traj.samples.front().S);
    rep.applicable = bc.applicable;
    if (!bc.applicable) {
        rep.holds = true;  // nothing to check for bounded detachment
        return rep;
    }
    rep.eta = bc.eta;
    rep.eta0 = bc.eta0;
    rep.eta1 = bc.eta1;
    rep.g0 = bc.g0;
    rep.h1 = bc.h1;
    rep.delta = bc.delta;
    const auto& first = traj.samples.front();
    const double V0 = mass_functional(bc, params.k1, first.h, first.S, first.Q);
    rep.bound = std::max(V0, bc.cap);
    rep.max_functional = -std::numeric_limits<double>::infinity();
    for (const auto& s : traj.samples) {
        rep.max_functional =
            std::max(rep.max_functional, mass_functional(bc, params.k1, s.h, s.S, s.Q));
    }
    rep.worst_excess = rep.max_functional - rep.bound;
    rep.holds = rep.worst_excess <= 1e-6;
    return rep;
}

LimitClassification classify_limit(const Trajectory& traj, double window, double tol,
                                   const ModelParams& params) {
    if (traj.samples.size() < 2)
        throw std::invalid_argument("classify_limit: need at least two samples");
    const double t_last = traj.samples.back().t;
    const double t_first = traj.samples.front().t;
    if (t_last - t_first < window)
        throw std::invalid_argument("classify_limit: trajectory shorter than window");

    const double t0 = t_last - window - 1e-12 * std::max(1.0, std::abs(t_last));
    std::size_t begin = 0;
    while (begin < traj.samples.size() && traj.samples[begin].t < t0) ++begin;

    LimitClassification out;
    bool washout = true;
    for (std::size_t i = begin; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        const double dev =
            std::max({std::abs(s.h), std::abs(s.S - params.sstar), std::abs(s.Q)});
        if (dev > tol) {
            washout = false;
            break;
        }
    }
    if (washout) {
        out.kind = LimitKind::Washout;
        out.point = {0.0, params.sstar, 0.0};
        return out;
    }

    Eigen::Vector3d mean{0.0, 0.0, 0.0};
    std::size_t count = 0;
    for (std::size_t i = begin; i < traj.samples.size(); ++i, ++count)
        mean += Eigen::Vector3d{traj.samples[i].h, traj.samples[i].S, traj.samples[i].Q};
    mean /= static_cast<double>(count);

    bool settled = true;
    for (std::size_t i = begin; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        const double dev = std::max({std::abs(s.h - mean(0)), std::abs(s.S - mean(1)),
                                     std::abs(s.Q - mean(2))});
        if (dev > tol) {
            settled = false;
            break;
        }
    }
    if (settled && mean(0) > tol) {
        out.kind = LimitKind::Nontrivial;
        out.point = mean;
    }
    return out;
}

} // namespace cstrbio
