#ifndef CSTRBIO_KINETICS_HPP
#define CSTRBIO_KINETICS_HPP

/**
 * @file kinetics.hpp
 * @brief Reactor constants and the model's four rate-function families.
 *
 * The model couples a wall biofilm of thickness h to a stirred bulk phase
 * (substrate S, suspended biomass Q) through four rate functions:
 *
 *   r(c)   growth of biofilm biomass at local substrate concentration c
 *   nu(S)  growth of suspended biomass
 *   g(s)   net biomass production per unit growth rate (affine: a*(s - b))
 *   d(h)   detachment rate from the wall
 *
 * Every family ships with its first derivative because the equilibrium and
 * stability machinery needs them. Families are closed types behind a
 * std::variant, so adding one means adding a variant alternative plus its
 * eval cases.
 */

#include <cmath>
#include <stdexcept>
#include <variant>

namespace cstrbio {

/// Reactor and coupling constants. All strictly positive; k2 is always
/// derived as D + kQ and never stored.
struct ModelParams {
    double kappa = 1.0;  ///< substrate diffusivity inside the biofilm
    double D = 1.0;      ///< dilution rate
    double k1 = 1.0;     ///< substrate consumption per unit suspended growth
    double kQ = 1.0;     ///< death rate of suspended bacteria
    double alpha = 1.0;  ///< attachment rate (bulk -> wall)
    double rho = 1.0;    ///< biomass density within the biofilm
    double beta = 1.0;   ///< conversion factor (wall -> bulk biomass units)
    double sstar = 1.0;  ///< inlet substrate concentration S*

    double k2() const { return D + kQ; }

    void validate() const {
        auto pos = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string(name) + " must be > 0");
        };
        pos(kappa, "kappa");
        pos(D, "D");
        pos(k1, "k1");
        pos(kQ, "kQ");
        pos(alpha, "alpha");
        pos(rho, "rho");
        pos(beta, "beta");
        pos(sstar, "sstar");
    }
};

/// Saturating law v(s) = vmax * s / (K + s).
struct MonodLaw {
    double vmax = 1.0;
    double K = 1.0;
};

/// v(s) = slope * s.
struct LinearLaw {
    double slope = 1.0;
};

/// v(s) = gain * (s - offset); used for the net growth g.
struct AffineLaw {
    double gain = 1.0;
    double offset = 1.0;
};

/// v(s) = value.
struct ConstantLaw {
    double value = 1.0;
};

using BiofilmGrowthLaw = std::variant<MonodLaw, LinearLaw>;
using SuspendedGrowthLaw = std::variant<MonodLaw>;
using NetGrowthLaw = std::variant<AffineLaw>;
using DetachmentLaw = std::variant<LinearLaw, ConstantLaw>;

/// The four selected rate functions of one scenario.
struct KineticsSet {
    BiofilmGrowthLaw r = MonodLaw{};
    SuspendedGrowthLaw nu = MonodLaw{};
    NetGrowthLaw g = AffineLaw{};
    DetachmentLaw d = LinearLaw{};

    void validate() const {
        auto pos = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string(name) + " must be > 0");
        };
        std::visit([&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, MonodLaw>) {
                pos(law.vmax, "mu_r");
                pos(law.K, "K_r");
            } else {
                pos(law.slope, "r slope");
            }
        }, r);
        const auto& m = std::get<MonodLaw>(nu);
        pos(m.vmax, "mu_nu");
        pos(m.K, "K_nu");
        const auto& a = std::get<AffineLaw>(g);
        pos(a.gain, "g gain a");
        pos(a.offset, "g offset b");
        std::visit([&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, LinearLaw>) pos(law.slope, "d0");
            else pos(law.value, "d0");
        }, d);
    }
};

namespace detail {
inline void require_nonnegative(double s, const char* fn) {
    if (s < 0.0)
        throw std::domain_error(std::string(fn) + ": negative argument");
}
} // namespace detail

inline double eval_r(const KineticsSet& kin, double c) {
    detail::require_nonnegative(c, "eval_r");
    return std::visit([c](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, MonodLaw>) return law.vmax * c / (law.K + c);
        else return law.slope * c;
    }, kin.r);
}

inline double eval_r_prime(const KineticsSet& kin, double c) {
    detail::require_nonnegative(c, "eval_r_prime");
    return std::visit([c](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, MonodLaw>) {
            const double den = law.K + c;
            return law.vmax * law.K / (den * den);
        } else {
            return law.slope;
        }
    }, kin.r);
}

inline double eval_nu(const KineticsSet& kin, double s) {
    detail::require_nonnegative(s, "eval_nu");
    const auto& m = std::get<MonodLaw>(kin.nu);
    return m.vmax * s / (m.K + s);
}

inline double eval_nu_prime(const KineticsSet& kin, double s) {
    detail::require_nonnegative(s, "eval_nu_prime");
    const auto& m = std::get<MonodLaw>(kin.nu);
    const double den = m.K + s;
    return m.vmax * m.K / (den * den);
}

inline double eval_g(const KineticsSet& kin, double s) {
    detail::require_nonnegative(s, "eval_g");
    const auto& a = std::get<AffineLaw>(kin.g);
    return a.gain * (s - a.offset);
}

inline double eval_d(const KineticsSet& kin, double h) {
    detail::require_nonnegative(h, "eval_d");
    return std::visit([h](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, LinearLaw>) return law.slope * h;
        else return law.value;
    }, kin.d);
}

inline double eval_d_prime(const KineticsSet& kin, double h) {
    detail::require_nonnegative(h, "eval_d_prime");
    return std::visit([](const auto& law) {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, LinearLaw>) return law.slope;
        else return 0.0;
    }, kin.d);
}

/// The affine net-growth law; all equilibrium uniqueness and stability
/// results require this form.
inline const AffineLaw& affine_net_growth(const KineticsSet& kin) {
    return std::get<AffineLaw>(kin.g);
}

inline bool detachment_is_unbounded(const KineticsSet& kin) {
    return std::holds_alternative<LinearLaw>(kin.d);
}

} // namespace cstrbio

#endif
