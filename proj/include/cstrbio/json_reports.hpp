#ifndef CSTRBIO_JSON_REPORTS_HPP
#define CSTRBIO_JSON_REPORTS_HPP

#include <json.hpp>

#include "cstrbio/dynamics.hpp"
#include "cstrbio/equilibria.hpp"
#include "cstrbio/stability.hpp"

namespace cstrbio {

nlohmann::json washout_report_json(const WashoutReport& report);
nlohmann::json equilibrium_point_json(const EquilibriumPoint& point);
nlohmann::json stability_report_json(const StabilityReport& report,
                                     const EquilibriumPoint& eq);

const char* to_string(LocalVerdict v);
const char* to_string(GlobalVerdict v);
const char* to_string(StabilityVerdictKind v);
const char* to_string(LimitKind v);

} // namespace cstrbio

#endif
