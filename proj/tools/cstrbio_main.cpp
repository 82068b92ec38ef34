// Command-line front end: scenario validation, simulation, equilibrium and
// stability reports, and parameter sweeps. Exit codes: 0 success, 2 config
// or precondition error, 3 solver failure, 4 no equilibrium found.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>
#include <vector>

#include "cstrbio/assumptions.hpp"
#include "cstrbio/config.hpp"
#include "cstrbio/dynamics.hpp"
#include "cstrbio/equilibria.hpp"
#include "cstrbio/io.hpp"
#include "cstrbio/json_reports.hpp"
#include "cstrbio/stability.hpp"

using nlohmann::json;
using namespace cstrbio;

namespace {

struct CommandFailure {
    int code;
    std::string message;
};

std::optional<EquilibriumPoint> find_any_equilibrium(const ScenarioConfig& cfg) {
    try {
        ShootingFindOptions opts;
        opts.bvp = cfg.bvp_options();
        return find_equilibrium_shooting(cfg.params, cfg.kinetics, opts);
    } catch (const PreconditionError&) {
    } catch (const ModelViolationError&) {
    }
    try {
        ReductionScanOptions opts;
        opts.bvp = cfg.bvp_options();
        ReductionResult res = find_equilibrium_reduction(cfg.params, cfg.kinetics, opts);
        if (!res.points.empty()) return res.points.front();
    } catch (const NoEquilibriumError&) {
    }
    return std::nullopt;
}

std::string suffixed_path(const std::string& path, std::size_t k) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + "_" + std::to_string(k);
    return path.substr(0, dot) + "_" + std::to_string(k) + path.substr(dot);
}

int cmd_validate(const std::string& config_path) {
    const ScenarioConfig cfg = load_config(config_path);
    cfg.params.validate();
    cfg.kinetics.validate();
    std::cout << render_assumption_report(validate_assumptions(cfg.params, cfg.kinetics));
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 const std::string& svg_path, const std::vector<std::string>& ic_specs) {
    const ScenarioConfig cfg = load_config(config_path);

    std::vector<ReactorState> initials;
    if (ic_specs.empty()) {
        initials.push_back(cfg.initial_state());
    } else {
        for (const auto& spec : ic_specs) {
            double h, S, Q;
            if (std::sscanf(spec.c_str(), "%lf,%lf,%lf", &h, &S, &Q) != 3)
                throw CommandFailure{2, "--ic expects 'h,S,Q', got '" + spec + "'"};
            if (h < 0 || S < 0 || Q < 0)
                throw CommandFailure{2, "--ic components must be nonnegative"};
            initials.push_back({0.0, h, S, Q});
        }
    }

    std::vector<Trajectory> trajectories;
    bool any_failed = false;
    for (std::size_t k = 0; k < initials.size(); ++k) {
        Trajectory traj = integrate(initials[k], cfg.t_end, cfg.kinetics, cfg.params,
                                    cfg.integrate_options());
        if (!traj.completed) any_failed = true;
        const std::string path =
            initials.size() == 1 ? out_path : suffixed_path(out_path, k);
        atomic_write_file(path, trajectory_csv(traj));
        trajectories.push_back(std::move(traj));
    }

    // limit classification over the trailing 20% of the run
    const double window = 0.2 * cfg.t_end;
    std::optional<Eigen::Vector3d> guide;
    bool saw_washout = false;
    for (std::size_t k = 0; k < trajectories.size(); ++k) {
        std::string label = "Undecided";
        if (cfg.t_end > 0.0 && trajectories[k].completed) {
            const LimitClassification cls =
                classify_limit(trajectories[k], window, 1e-3, cfg.params);
            label = to_string(cls.kind);
            if (cls.kind == LimitKind::Nontrivial) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), " (h=%.6g, S=%.6g, Q=%.6g)", cls.point(0),
                              cls.point(1), cls.point(2));
                label += buf;
                if (!guide) guide = cls.point;
            }
            if (cls.kind == LimitKind::Washout) saw_washout = true;
        } else if (!trajectories[k].completed) {
            label = "Failed (" + trajectories[k].failure_reason + ")";
        }
        std::cout << "trajectory " << k << ": " << label << "\n";
    }
    if (!guide && saw_washout)
        guide = Eigen::Vector3d{0.0, cfg.params.sstar, 0.0};

    if (!svg_path.empty()) {
        double g[3];
        if (guide) {
            g[0] = (*guide)(0);
            g[1] = (*guide)(1);
            g[2] = (*guide)(2);
        }
        atomic_write_file(svg_path, trajectory_svg(trajectories, guide ? g : nullptr));
    }
    return any_failed ? 3 : 0;
}

int cmd_washout(const std::string& config_path) {
    const ScenarioConfig cfg = load_config(config_path);
    const WashoutReport rep = washout_analysis(cfg.params, cfg.kinetics);
    std::cout << washout_report_json(rep).dump(2) << "\n";
    return 0;
}

int cmd_equilibrium(const std::string& config_path, const std::string& method) {
    const ScenarioConfig cfg = load_config(config_path);
    const bool want_reduction = method == "reduction" || method == "both";
    const bool want_shooting = method == "shooting" || method == "both";
    json out;
    std::vector<EquilibriumPoint> reduction_points;
    std::optional<EquilibriumPoint> shooting_point;

    if (want_reduction) {
        ReductionScanOptions opts;
        opts.bvp = cfg.bvp_options();
        try {
            ReductionResult res = find_equilibrium_reduction(cfg.params, cfg.kinetics, opts);
            reduction_points = res.points;
            json points = json::array();
            for (const auto& p : reduction_points) points.push_back(equilibrium_point_json(p));
            out["reduction"] = {{"found", !reduction_points.empty()}, {"points", points}};
            if (!res.diagnostic.empty()) out["reduction"]["diagnostic"] = res.diagnostic;
        } catch (const NoEquilibriumError& e) {
            out["reduction"] = {{"found", false}, {"reason", e.what()}};
        }
    }
    if (want_shooting) {
        ShootingFindOptions opts;
        opts.bvp = cfg.bvp_options();
        try {
            shooting_point = find_equilibrium_shooting(cfg.params, cfg.kinetics, opts);
            out["shooting"] = {{"found", true},
                               {"point", equilibrium_point_json(*shooting_point)}};
        } catch (const PreconditionError& e) {
            if (method == "shooting") throw;  // explicit request: surface as exit 2
            out["shooting"] = {{"found", false}, {"reason", e.what()}};
        } catch (const ModelViolationError& e) {
            out["shooting"] = {{"found", false}, {"reason", e.what()}};
        }
    }

    if (shooting_point && !reduction_points.empty()) {
        const EquilibriumPoint* nearest = &reduction_points.front();
        for (const auto& p : reduction_points)
            if (std::abs(p.h_star - shooting_point->h_star) <
                std::abs(nearest->h_star - shooting_point->h_star))
                nearest = &p;
        const double dh = std::abs(nearest->h_star - shooting_point->h_star);
        const double dS = std::abs(nearest->S_star - shooting_point->S_star);
        const double dQ = std::abs(nearest->Q_star - shooting_point->Q_star);
        const double scale = std::max({1.0, std::abs(nearest->h_star),
                                       std::abs(nearest->S_star), std::abs(nearest->Q_star)});
        out["discrepancy"] = {{"h", dh},
                              {"S", dS},
                              {"Q", dQ},
                              {"max_abs", std::max({dh, dS, dQ})},
                              {"max_rel", std::max({dh, dS, dQ}) / scale}};
    }

    std::cout << out.dump(2) << "\n";
    return (!reduction_points.empty() || shooting_point) ? 0 : 4;
}

int cmd_stability(const std::string& config_path) {
    const ScenarioConfig cfg = load_config(config_path);
    const std::optional<EquilibriumPoint> eq = find_any_equilibrium(cfg);
    if (!eq) {
        std::cerr << "no nontrivial equilibrium found\n";
        return 4;
    }
    const StabilityReport rep = stability_verdict(*eq, cfg.params, cfg.kinetics);
    std::cout << stability_report_json(rep, *eq).dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param, double from,
              double to, int steps, const std::string& out_path) {
    if (param != "sstar")
        throw CommandFailure{2, "only '--param sstar' is supported"};
    if (steps < 2) throw CommandFailure{2, "--steps must be >= 2"};
    if (!(from < to)) throw CommandFailure{2, "--from must be < --to"};
    const ScenarioConfig base = load_config(config_path);

    std::vector<SweepRow> rows(steps);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < steps; i = next.fetch_add(1)) {
            ScenarioConfig cfg = base;
            cfg.params.sstar = from + (to - from) * i / (steps - 1);
            SweepRow row;
            row.sstar = cfg.params.sstar;
            row.h_star = row.S_star = row.Q_star = std::nan("");
            row.verdict = "None";
            try {
                row.lambda_plus_washout =
                    washout_analysis(cfg.params, cfg.kinetics).lambda_plus;
                if (auto eq = find_any_equilibrium(cfg)) {
                    row.found = true;
                    row.h_star = eq->h_star;
                    row.S_star = eq->S_star;
                    row.Q_star = eq->Q_star;
                    row.verdict = to_string(stability_verdict(*eq, cfg.params, cfg.kinetics).verdict);
                }
            } catch (const std::exception&) {
                row.found = false;  // per-point failures never abort the sweep
            }
            rows[i] = std::move(row);
        }
    };
    const unsigned n_threads =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(steps));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    atomic_write_file(out_path, sweep_csv(rows));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CSTR biofilm model: simulation, equilibria, stability"};
    app.require_subcommand(1);

    std::string config_path, out_path, svg_path, method = "both", param = "sstar";
    std::vector<std::string> ic_specs;
    double from = 0.0, to = 0.0;
    int steps = 0;

    CLI::App* validate = app.add_subcommand("validate", "check structural conditions");
    validate->add_option("--config", config_path, "scenario file")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "integrate trajectories");
    simulate->add_option("--config", config_path, "scenario file")->required();
    simulate->add_option("--out", out_path, "trajectory CSV path")->required();
    simulate->add_option("--svg", svg_path, "optional SVG plot path");
    simulate->add_option("--ic", ic_specs, "initial condition h,S,Q (repeatable)");

    CLI::App* washout = app.add_subcommand("washout", "washout equilibrium report");
    washout->add_option("--config", config_path, "scenario file")->required();

    CLI::App* equilibrium = app.add_subcommand("equilibrium", "nontrivial equilibrium report");
    equilibrium->add_option("--config", config_path, "scenario file")->required();
    equilibrium->add_option("--method", method, "reduction|shooting|both")
        ->check(CLI::IsMember({"reduction", "shooting", "both"}));

    CLI::App* stability = app.add_subcommand("stability", "stability report");
    stability->add_option("--config", config_path, "scenario file")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "equilibrium branch over a parameter");
    sweep->add_option("--config", config_path, "scenario file")->required();
    sweep->add_option("--param", param, "swept parameter (sstar)")->required();
    sweep->add_option("--from", from, "range start")->required();
    sweep->add_option("--to", to, "range end")->required();
    sweep->add_option("--steps", steps, "grid points")->required();
    sweep->add_option("--out", out_path, "branch CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(config_path);
        if (simulate->parsed()) return cmd_simulate(config_path, out_path, svg_path, ic_specs);
        if (washout->parsed()) return cmd_washout(config_path);
        if (equilibrium->parsed()) return cmd_equilibrium(config_path, method);
        if (stability->parsed()) return cmd_stability(config_path);
        if (sweep->parsed()) return cmd_sweep(config_path, param, from, to, steps, out_path);
    } catch (const CommandFailure& e) {
        std::cerr << e.message << "\n";
        return e.code;
    } catch (const ConfigError& e) {
        std::cerr << "config error at line " << e.line << ", column " << e.column << ": "
                  << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const NoEquilibriumError& e) {
        std::cerr << e.what() << "\n";
        return 4;
    } catch (const InfeasibleError& e) {
        std::cerr << e.what() << "\n";
        return 4;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << " (defect " << e.defect << ")\n";
        return 3;
    } catch (const ModelViolationError& e) {
        std::cerr << "model violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
