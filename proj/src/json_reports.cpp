#include "cstrbio/json_reports.hpp"

namespace cstrbio {

namespace {

nlohmann::json matrix_json(const Eigen::Matrix3d& A) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < 3; ++j) row.push_back(A(i, j));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

const char* to_string(LocalVerdict v) {
    switch (v) {
        case LocalVerdict::Stable: return "Stable";
        case LocalVerdict::Unstable: return "Unstable";
        default: return "Marginal";
    }
}

const char* to_string(GlobalVerdict v) {
    return v == GlobalVerdict::GloballyStable ? "GloballyStable" : "Unknown";
}

const char* to_string(StabilityVerdictKind v) {
    switch (v) {
        case StabilityVerdictKind::LocallyStable: return "LocallyStable";
        case StabilityVerdictKind::Unstable: return "Unstable";
        default: return "Inconclusive";
    }
}

const char* to_string(LimitKind v) {
    switch (v) {
        case LimitKind::Washout: return "Washout";
        case LimitKind::Nontrivial: return "Nontrivial";
        default: return "Undecided";
    }
}

nlohmann::json washout_report_json(const WashoutReport& rep) {
    return nlohmann::json{
        {"jacobian", matrix_json(rep.jacobian)},
        {"p", rep.p},
        {"q", rep.q},
        {"lambda0", rep.lambda0},
        {"lambda_plus", rep.lambda_plus},
        {"lambda_minus", rep.lambda_minus},
        {"s1", rep.s1_holds},
        {"s2", rep.s2_holds},
        {"local_verdict", to_string(rep.local_verdict)},
        {"global_verdict", to_string(rep.global_verdict)},
    };
}

nlohmann::json equilibrium_point_json(const EquilibriumPoint& eq) {
    return nlohmann::json{
        {"h_star", eq.h_star},
        {"S_star", eq.S_star},
        {"Q_star", eq.Q_star},
        {"Delta", eq.Delta},
        {"u0", eq.c_star.u0()},
        {"method", eq.method == EquilibriumMethod::Reduction ? "reduction" : "shooting"},
        {"residuals", {eq.residuals(0), eq.residuals(1), eq.residuals(2)}},
    };
}

nlohmann::json stability_report_json(const StabilityReport& rep, const EquilibriumPoint& eq) {
    nlohmann::json eigs = nlohmann::json::array();
    for (const auto& z : rep.eigenvalues)
        eigs.push_back({{"re", z.real()}, {"im", z.imag()}});
    nlohmann::json j{
        {"h_star", eq.h_star},
        {"S_star", eq.S_star},
        {"Q_star", eq.Q_star},
        {"jacobian_analytic", matrix_json(rep.jacobian_analytic)},
        {"jacobian_fd", matrix_json(rep.jacobian_fd)},
        {"G", rep.G},
        {"H", rep.H},
        {"Delta", rep.Delta},
        {"m0", rep.matrix_route.m0},
        {"m1", rep.matrix_route.m1},
        {"m2", rep.matrix_route.m2},
        {"m3", rep.matrix_route.m3},
        {"m0_cf", rep.closed_form.m0},
        {"m1_cf", rep.closed_form.m1},
        {"m2_cf", rep.closed_form.m2},
        {"m3_cf", rep.closed_form.m3},
        {"eigenvalues", eigs},
        {"verdict", to_string(rep.verdict)},
        {"hh3_holds", rep.hh3_holds},
        {"hypothesis_gap", rep.hypothesis_gap},
    };
    const char* names[4] = {"m0_terms", "m1_terms", "m2_terms", "m3_terms"};
    for (int i = 0; i < 4; ++i) j[names[i]] = rep.closed_form_terms[i];
    return j;
}

} // namespace cstrbio
