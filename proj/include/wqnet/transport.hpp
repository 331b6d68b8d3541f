#ifndef WQNET_TRANSPORT_HPP
#define WQNET_TRANSPORT_HPP

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "wqnet/common.hpp"
#include "wqnet/network.hpp"

namespace wqnet {

enum class FlowRegime { Laminar, TransitionalTurbulent };
enum class SchemeId { EU, IU, LW, BE };

inline const char* scheme_name(SchemeId s)
{
    switch (s) {
        case SchemeId::EU: return "EU";
        case SchemeId::IU: return "IU";
        case SchemeId::LW: return "LW";
        case SchemeId::BE: return "BE";
    }
    return "?";
}

inline constexpr double kLaminarReynolds = 2300.0;
inline constexpr double kStagnantVelocity = 1e-9;  // m/s; below this a pipe is pure reaction

struct TransportConfig {
    FluidProps fluid;
    double shear_fraction = 0.1;     // v_tau = shear_fraction * |v| in the turbulent branch
    double peclet_threshold = 1000;  // dispersion neglected above this
    double dispersion_scale = 1.0;   // test hook; multiplies the computed D
};

/// Re = rho * d * |v| / mu.
inline double reynolds_number(const PipeSpec& pipe, double v, const FluidProps& fluid = {})
{
    return fluid.density * pipe.diameter * std::abs(v) / fluid.viscosity;
}

inline FlowRegime classify_regime(double reynolds)
{
    return reynolds < kLaminarReynolds ? FlowRegime::Laminar : FlowRegime::TransitionalTurbulent;
}

// Effective longitudinal dispersion coefficient. Laminar branch is the
// residence-time-averaged Taylor value with t_r = L/|v|; the turbulent
// branch depends on the flow condition through the shear velocity.
// A stagnant pipe has no dispersion.
inline double dispersion_coefficient(const PipeSpec& pipe, double v, FlowRegime regime,
                                     const TransportConfig& cfg = {})
{
    double speed = std::abs(v);
    if (speed < kStagnantVelocity) return 0.0;
    double d = pipe.diameter;
    double D;
    if (regime == FlowRegime::Laminar) {
        double tr = pipe.length / speed;
        double beta = 4.0 * pipe.dm * tr / (d * d);
        double bracket = 1.0 - (1.0 - std::exp(-beta)) / beta;
        D = d * d * speed * speed / (12.0 * pipe.dm) * bracket;
    } else {
        double re = reynolds_number(pipe, speed, cfg.fluid);
        double v_tau = cfg.shear_fraction * speed;
        D = 0.5 * d * v_tau * (10.1 + 577.0 * std::pow(re / 100.0, -2.2));
    }
    return cfg.dispersion_scale * D;
}

/// Pe = |v| L / D; +inf when D = 0 (pure advection or stagnant).
inline double peclet_number(const PipeSpec& pipe, double v, double D)
{
    if (D <= 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(v) * pipe.length / D;
}

// Regime snapshot for one pipe at one hydraulic step.
struct FlowRegimeSample {
    int pipe = -1;
    int step = -1;
    double speed = 0;     // |v|, m/s
    double reynolds = 0;
    double dispersion = 0;  // D, m^2/s
    double peclet = 0;
    FlowRegime regime = FlowRegime::Laminar;
    bool dispersion_active = false;  // Pe <= Pe_th
};

inline FlowRegimeSample flow_regime_sample(const NetworkTopology& topo, int pipe, int step, double v,
                                           const TransportConfig& cfg)
{
    FlowRegimeSample s;
    s.pipe = pipe;
    s.step = step;
    s.speed = std::abs(v);
    const PipeSpec& ps = topo.pipes[pipe];
    s.reynolds = reynolds_number(ps, v, cfg.fluid);
    s.regime = classify_regime(s.reynolds);
    s.dispersion = dispersion_coefficient(ps, v, s.regime, cfg);
    s.peclet = peclet_number(ps, v, s.dispersion);
    s.dispersion_active = s.peclet <= cfg.peclet_threshold;
    return s;
}

// One row of the four-scheme table, as multipliers on the
// (upstream neighbor, self, downstream neighbor) triple. For the first
// segment the upstream slot is the upstream node state; for the last
// segment the downstream slot is the downstream node state. lhs holds
// the t+dt coefficients (E entries), rhs the t coefficients (A entries).
struct StencilRow {
    std::array<double, 3> lhs{0, 0, 0};
    std::array<double, 3> rhs{0, 0, 0};
};

struct SchemeCoefficients {
    SchemeId scheme = SchemeId::EU;
    double courant = 0;  // lambda~
    double alpha = 0;    // dispersion number
    double lw_under = 0, lw_mid = 0, lw_over = 0;
    StencilRow row;
};

inline SchemeCoefficients stencil_coefficients(SchemeId scheme, double courant, double alpha)
{
    SchemeCoefficients c;
    c.scheme = scheme;
    c.courant = courant;
    c.alpha = alpha;
    c.lw_under = 0.5 * courant * (1.0 + courant);
    c.lw_mid = 1.0 - courant * courant;
    c.lw_over = -0.5 * courant * (1.0 - courant);
    switch (scheme) {
        case SchemeId::EU:
            c.row.lhs = {0, 1, 0};
            c.row.rhs = {courant, 1.0 - courant, 0};
            break;
        case SchemeId::IU:
            c.row.lhs = {-courant, 1.0 + courant, 0};
            c.row.rhs = {0, 1, 0};
            break;
        case SchemeId::LW:
            c.row.lhs = {0, 1, 0};
            c.row.rhs = {c.lw_under + alpha, c.lw_mid - 2.0 * alpha, c.lw_over + alpha};
            break;
        case SchemeId::BE:
            c.row.lhs = {-0.5 * courant - alpha, 1.0 + 2.0 * alpha, 0.5 * courant - alpha};
            c.row.rhs = {0, 1, 0};
            break;
        default:
            throw NumericalError("unknown discretization scheme id");
    }
    return c;
}

}  // namespace wqnet

#endif
