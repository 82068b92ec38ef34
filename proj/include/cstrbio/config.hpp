#ifndef CSTRBIO_CONFIG_HPP
#define CSTRBIO_CONFIG_HPP

/**
 * @file config.hpp
 * @brief Scenario files: flat `key = value` lines, `#` comments.
 *
 * Unknown keys are rejected with their source position. `k2` is never an
 * input; it is always derived as D + kQ.
 */

#include <string>

#include "cstrbio/dynamics.hpp"
#include "cstrbio/kinetics.hpp"

namespace cstrbio {

struct ScenarioConfig {
    ModelParams params;
    KineticsSet kinetics;
    double h0 = 0.0;
    double S0 = 0.0;
    double Q0 = 0.0;
    // solver options
    int bvp_n = 512;
    double bvp_tol = 1e-10;
    double ode_rtol = 1e-8;
    double t_end = 100.0;
    double sample_dt = 0.1;

    ReactorState initial_state() const { return {0.0, h0, S0, Q0}; }

    BvpOptions bvp_options() const {
        BvpOptions o;
        o.n = bvp_n;
        o.tol = bvp_tol;
        return o;
    }

    IntegrateOptions integrate_options() const {
        IntegrateOptions o;
        o.rtol = ode_rtol;
        o.sample_dt = sample_dt;
        o.bvp = bvp_options();
        return o;
    }
};

/// Parse scenario text. Throws ConfigError with line/column diagnostics.
ScenarioConfig parse_config(const std::string& text);

/// Read and parse a scenario file.
ScenarioConfig load_config(const std::string& path);

/// Canonical text form; parse(serialize(c)) reproduces c exactly.
std::string serialize_config(const ScenarioConfig& config);

} // namespace cstrbio

#endif
