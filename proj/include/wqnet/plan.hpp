#ifndef WQNET_PLAN_HPP
#define WQNET_PLAN_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wqnet/common.hpp"
#include "wqnet/hydraulics.hpp"
#include "wqnet/network.hpp"
#include "wqnet/transport.hpp"

namespace wqnet {

enum class SchemeFamily { Explicit, Implicit };
enum class SegmentationMode { PaperFixed, LengthScaled };

struct PlanConfig {
    TransportConfig transport;
    double dt_cap = 300.0;  // s; upper bound on the WQ step
    double dt_min = 1e-3;   // s; below this planning fails
    SegmentationMode seg_mode = SegmentationMode::LengthScaled;  // implicit family only
    int fixed_segments = 10;     // PaperFixed
    double dx_target = 50.0;     // m, LengthScaled
};

struct DiscretizationPlan {
    double dt = 0;  // s, divides the hydraulic step exactly
    int substeps = 0;  // hydraulic step / dt
    SchemeFamily family = SchemeFamily::Explicit;
    double peclet_threshold = 1000;
    std::vector<int> segments;          // s_L per pipe
    std::vector<double> dx;             // m per pipe
    std::vector<std::string> binding;   // what fixed each pipe's grid (report)
    int total_segments() const
    {
        int n = 0;
        for (int s : segments) n += s;
        return n;
    }
};

namespace detail {

// Largest dt <= bound that divides dt_hyd an integer number of times.
inline int substeps_for(double dt_hyd, double bound)
{
    return static_cast<int>(std::ceil(dt_hyd / bound - 1e-12));
}

struct StabilityViolation {
    int pipe, step;
    std::string what;
};

// Explicit-family conditions: Courant in (0,1] where flowing, and on
// dispersion-active pipe/steps lambda^2 <= 2 alpha <= 1 and the grid
// ratio v dx / D <= 2.
inline std::vector<StabilityViolation> audit_explicit(const NetworkTopology& topo,
                                                      const HydraulicTrace& trace,
                                                      const DiscretizationPlan& plan,
                                                      const TransportConfig& tcfg)
{
    std::vector<StabilityViolation> out;
    const double tol = 1e-9;
    for (int p = 0; p < topo.n_pipes(); ++p) {
        for (int k = 0; k < trace.steps; ++k) {
            auto s = flow_regime_sample(topo, p, k, trace.pipe_velocity(k, p), tcfg);
            if (s.speed < kStagnantVelocity) continue;
            double lam = s.speed * plan.dt / plan.dx[p];
            if (lam > 1.0 + tol) out.push_back({p, k, "courant"});
            if (s.dispersion_active) {
                double alpha = s.dispersion * plan.dt / (plan.dx[p] * plan.dx[p]);
                if (lam * lam > 2.0 * alpha + tol) out.push_back({p, k, "von-neumann-lower"});
                if (2.0 * alpha > 1.0 + tol) out.push_back({p, k, "von-neumann-upper"});
                if (s.speed * plan.dx[p] / s.dispersion > 2.0 + tol) out.push_back({p, k, "grid-peclet"});
            }
        }
    }
    return out;
}

}  // namespace detail

// Time-step and grid determination. The WQ step starts from the cap,
// shrinks to 2D/v^2 over every dispersion-active pipe/step, and is then
// rounded down so it divides the hydraulic step exactly. Explicit grids
// take dx as the largest lower bound seen across steps (sqrt(2 D dt)
// where dispersion is active, v dt otherwise), snapped to an integer
// segment count. If the snapped grid fails the stability audit the step
// is refined to the next divisor and the grid rebuilt.
inline DiscretizationPlan plan_grid(const NetworkTopology& topo, const HydraulicTrace& trace,
                                    SchemeFamily family, double peclet_threshold,
                                    const PlanConfig& cfg = {})
{
    TransportConfig tcfg = cfg.transport;
    tcfg.peclet_threshold = peclet_threshold;

    double dt = cfg.dt_cap;
    int binding_pipe = -1, binding_step = -1;
    for (int p = 0; p < topo.n_pipes(); ++p)
        for (int k = 0; k < trace.steps; ++k) {
            auto s = flow_regime_sample(topo, p, k, trace.pipe_velocity(k, p), tcfg);
            if (s.speed < kStagnantVelocity || !s.dispersion_active) continue;
            double bound = 2.0 * s.dispersion / (s.speed * s.speed);
            if (bound < dt) {
                dt = bound;
                binding_pipe = p;
                binding_step = k;
            }
        }
    if (dt < cfg.dt_min) {
        std::string who = binding_pipe >= 0 ? "pipe '" + topo.pipes[binding_pipe].id + "' at step " +
                                                  std::to_string(binding_step)
                                            : "the configured cap";
        throw PlanningError("no feasible WQ time-step: bound " + text::format_g(dt) +
                            " s from " + who + " is below dt_min " + text::format_g(cfg.dt_min));
    }

    DiscretizationPlan plan;
    plan.family = family;
    plan.peclet_threshold = peclet_threshold;

    int substeps = detail::substeps_for(trace.dt_hyd, dt);
    const int max_substeps = 1 << 20;

    while (true) {
        plan.substeps = substeps;
        plan.dt = trace.dt_hyd / substeps;
        if (plan.dt < cfg.dt_min)
            throw PlanningError("no feasible WQ time-step: divisibility rounding pushed dt below dt_min " +
                                text::format_g(cfg.dt_min));
        plan.segments.assign(topo.n_pipes(), 1);
        plan.dx.assign(topo.n_pipes(), 0.0);
        plan.binding.assign(topo.n_pipes(), "none");

        if (family == SchemeFamily::Explicit) {
            bool grid_ok = true;
            for (int p = 0; p < topo.n_pipes(); ++p) {
                double dx_req = 0;
                std::string binding = "stagnant";
                for (int k = 0; k < trace.steps; ++k) {
                    auto s = flow_regime_sample(topo, p, k, trace.pipe_velocity(k, p), tcfg);
                    if (s.speed < kStagnantVelocity) continue;
                    double cand;
                    std::string why;
                    if (s.dispersion_active) {
                        cand = std::sqrt(2.0 * s.dispersion * plan.dt);
                        why = "von-neumann";
                    } else {
                        cand = s.speed * plan.dt;
                        why = "cfl";
                    }
                    if (cand > dx_req) {
                        dx_req = cand;
                        binding = why;
                    }
                }
                const PipeSpec& ps = topo.pipes[p];
                if (dx_req <= 0) {  // pipe stagnant for the whole trace
                    plan.segments[p] = 1;
                    plan.dx[p] = ps.length;
                    plan.binding[p] = binding;
                    continue;
                }
                if (dx_req > ps.length) {  // cannot fit one stable cell; refine dt
                    grid_ok = false;
                    break;
                }
                int sl = std::max(1, static_cast<int>(std::floor(ps.length / dx_req)));
                plan.segments[p] = sl;
                plan.dx[p] = ps.length / sl;
                plan.binding[p] = binding;
            }
            if (grid_ok && detail::audit_explicit(topo, trace, plan, tcfg).empty()) break;
        } else {
            for (int p = 0; p < topo.n_pipes(); ++p) {
                const PipeSpec& ps = topo.pipes[p];
                int sl = cfg.seg_mode == SegmentationMode::PaperFixed
                             ? cfg.fixed_segments
                             : std::max(1, static_cast<int>(std::lround(ps.length / cfg.dx_target)));
                plan.segments[p] = sl;
                plan.dx[p] = ps.length / sl;
                plan.binding[p] = cfg.seg_mode == SegmentationMode::PaperFixed ? "fixed" : "length-scaled";
            }
            // Unconditionally stable; large Courant numbers only cost accuracy.
            for (int p = 0; p < topo.n_pipes(); ++p)
                for (int k = 0; k < trace.steps; ++k) {
                    double lam = std::abs(trace.pipe_velocity(k, p)) * plan.dt / plan.dx[p];
                    if (lam > 5.0) {
                        warn("pipe '" + topo.pipes[p].id + "' has Courant number " +
                             text::format_g(lam) + " at step " + std::to_string(k) +
                             "; implicit stepping stays stable but accuracy degrades");
                        k = trace.steps;
                    }
                }
            break;
        }

        // Tighten: move to the next divisor of the hydraulic step.
        int next = std::max(substeps + 1, static_cast<int>(std::ceil(substeps * 1.25)));
        if (next > max_substeps) {
            auto viol = detail::audit_explicit(topo, trace, plan, tcfg);
            std::string who = viol.empty() ? "grid snapping"
                                           : "pipe '" + topo.pipes[viol[0].pipe].id + "' at step " +
                                                 std::to_string(viol[0].step) + " (" + viol[0].what + ")";
            throw PlanningError("no stable explicit grid found; binding constraint: " + who);
        }
        substeps = next;
    }
    return plan;
}

// Plan report plus a per-step regime/Peclet histogram (structured text).
inline std::string plan_report(const NetworkTopology& topo, const HydraulicTrace& trace,
                               const DiscretizationPlan& plan, const TransportConfig& tcfg_in)
{
    TransportConfig tcfg = tcfg_in;
    tcfg.peclet_threshold = plan.peclet_threshold;
    std::string out;
    out += "dt " + text::format_g(plan.dt) + "\n";
    out += "substeps " + std::to_string(plan.substeps) + "\n";
    out += "family " + std::string(plan.family == SchemeFamily::Explicit ? "explicit" : "implicit") + "\n";
    out += "pe_threshold " + text::format_g(plan.peclet_threshold) + "\n";
    for (int p = 0; p < topo.n_pipes(); ++p)
        out += "pipe " + topo.pipes[p].id + " segments " + std::to_string(plan.segments[p]) + " dx " +
               text::format_g(plan.dx[p]) + " binding " + plan.binding[p] + "\n";
    out += "# step laminar turbulent stagnant dispersion_active\n";
    for (int k = 0; k < trace.steps; ++k) {
        int lam = 0, turb = 0, stag = 0, act = 0;
        for (int p = 0; p < topo.n_pipes(); ++p) {
            auto s = flow_regime_sample(topo, p, k, trace.pipe_velocity(k, p), tcfg);
            if (s.speed < kStagnantVelocity)
                ++stag;
            else if (s.regime == FlowRegime::Laminar)
                ++lam;
            else
                ++turb;
            if (s.dispersion_active && s.speed >= kStagnantVelocity) ++act;
        }
        out += "hist " + std::to_string(k) + " " + std::to_string(lam) + " " + std::to_string(turb) +
               " " + std::to_string(stag) + " " + std::to_string(act) + "\n";
    }
    return out;
}

}  // namespace wqnet

#endif
