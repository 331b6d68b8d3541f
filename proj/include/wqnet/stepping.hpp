#ifndef WQNET_STEPPING_HPP
#define WQNET_STEPPING_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "wqnet/assembly.hpp"
#include "wqnet/scenario.hpp"

namespace wqnet {

/// One nonlinear step: solve E x+ = A x + B u + fmap * r(x).
inline Eigen::VectorXd step_nonlinear(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                      const SystemMatrices& mats)
{
    if (x.size() != mats.layout.dimension() || u.size() != mats.B.cols())
        throw NumericalError("step_nonlinear: dimension mismatch");
    Eigen::VectorXd rhs = mats.A * x + mats.B * u + mats.fmap * raw_reactions(x, mats);
    return mats.solve_e(rhs);
}

/// One linearized step: solve E x+ = A~ x + B u + phi.
inline Eigen::VectorXd step_linear(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                   const SystemMatrices& mats)
{
    if (mats.mode != ModelMode::Linearized)
        throw NumericalError("step_linear requires matrices assembled in linearized mode");
    if (x.size() != mats.layout.dimension() || u.size() != mats.B.cols())
        throw NumericalError("step_linear: dimension mismatch");
    Eigen::VectorXd rhs = mats.A * x + mats.B * u + mats.phi;
    return mats.solve_e(rhs);
}

struct Trajectory {
    double dt = 0;
    int steps = 0;                 // N_s
    StateLayout layout;
    Eigen::MatrixXd states;        // (N_s + 1) x dim
    Eigen::MatrixXd inputs;        // N_s x n_u
    std::vector<std::vector<SchemeId>> scheme_tags;  // per hydraulic step, per pipe
    long clamped_negative = 0;     // negative concentrations clamped to zero
    long deep_negative = 0;        // of those, below -1e-9
};

struct SimOptions {
    ModelMode mode = ModelMode::Nonlinear;
    EngineOptions engine;
    ReactionParams reaction;
    int op_refresh_substeps = 0;  // linearized: refresh every m WQ steps; 0 = every hydraulic step
    std::function<void(int, const SystemMatrices&)> on_assemble;  // test/report hook
};

// Expands the initial-state file entries onto the state vector. Pipe
// entries are uniform (one value) or per segment (s_L values).
inline Eigen::VectorXd expand_initial_state(const NetworkTopology& topo, const StateLayout& ly,
                                            const SpeciesInitialState& init)
{
    Eigen::VectorXd x = Eigen::VectorXd::Zero(ly.dimension());
    for (int s = 0; s < kSpeciesCount; ++s) {
        const auto& blk = init.species[s];
        Species sp = static_cast<Species>(s);
        for (const auto& [id, v] : blk.node) {
            auto n = topo.find_node(id);
            if (!n) throw ValidationError("initial state names unknown node '" + id + "'");
            if (topo.node_kind(*n) == NodeKind::Reservoir) continue;  // reservoirs come from the network file
            x[ly.state(sp, ly.node_location(*n))] = v;
        }
        for (const auto& [id, v] : blk.link) {
            auto l = topo.find_link(id);
            if (!l) throw ValidationError("initial state names unknown link '" + id + "'");
            int loc = topo.link_kind(*l) == LinkKind::Pump
                          ? ly.pump_location(*l - topo.n_pipes())
                          : ly.valve_location(*l - topo.n_pipes() - topo.n_pumps());
            x[ly.state(sp, loc)] = v;
        }
        for (const auto& [id, vals] : blk.pipe) {
            auto l = topo.find_link(id);
            if (!l || topo.link_kind(*l) != LinkKind::Pipe)
                throw ValidationError("initial state names unknown pipe '" + id + "'");
            int sl = ly.pipe_segments[*l];
            if (vals.size() != 1 && static_cast<int>(vals.size()) != sl)
                throw ValidationError("initial state for pipe '" + id + "' has " +
                                      std::to_string(vals.size()) + " values; expected 1 or " +
                                      std::to_string(sl));
            for (int seg = 0; seg < sl; ++seg)
                x[ly.state(sp, ly.segment_location(*l, seg))] =
                    vals.size() == 1 ? vals[0] : vals[seg];
        }
    }
    for (int r = 0; r < topo.n_reservoirs(); ++r) {
        int loc = ly.node_location(topo.node_of_reservoir(r));
        for (int s = 0; s < kSpeciesCount; ++s)
            x[ly.state(static_cast<Species>(s), loc)] = topo.reservoirs[r].source[s];
    }
    return x;
}

// Advances the scenario over the whole trace. Matrices are reassembled
// at every hydraulic boundary, per-pipe AR/ADR selection is re-evaluated
// through the Peclet test, and in linearized mode the operating point is
// refreshed to the current state on the configured schedule.
inline Trajectory simulate(const NetworkTopology& topo, const HydraulicTrace& trace,
                           const DiscretizationPlan& plan, const ReactionParams& params,
                           const Eigen::VectorXd& x0, const Eigen::MatrixXd& inputs,
                           const SimOptions& opt = {})
{
    StateLayout ly(topo, plan);
    const int n_u = static_cast<int>(topo.boosters.size());
    const int total = trace.steps * plan.substeps;
    if (x0.size() != ly.dimension()) throw NumericalError("simulate: x0 does not match the layout");
    if (inputs.size() > 0 && (inputs.rows() < total || inputs.cols() != n_u))
        throw NumericalError("simulate: inputs must be (N_s x n_u)");

    Trajectory out;
    out.dt = plan.dt;
    out.steps = total;
    out.layout = ly;
    out.states.resize(total + 1, ly.dimension());
    out.inputs = Eigen::MatrixXd::Zero(total, std::max(n_u, 0));
    out.states.row(0) = x0.transpose();

    Eigen::VectorXd x = x0;
    OperatingPoint op;
    op.cl = x.segment(0, ly.n_locations);
    op.fr = x.segment(ly.n_locations, ly.n_locations);

    int step_index = 0;
    for (int k = 0; k < trace.steps; ++k) {
        if (opt.mode == ModelMode::Linearized && opt.op_refresh_substeps == 0) {
            op.cl = x.segment(0, ly.n_locations);
            op.fr = x.segment(ly.n_locations, ly.n_locations);
            op.time = k * trace.dt_hyd;
        }
        SystemMatrices mats;
        try {
            mats = assemble_system(topo, trace, plan, params, k, opt.mode, op, opt.engine);
        } catch (const std::exception& e) {
            throw NumericalError("assembly failed at hydraulic step " + std::to_string(k) + ": " +
                                 e.what());
        }
        out.scheme_tags.push_back(mats.pipe_scheme);
        if (opt.on_assemble) opt.on_assemble(k, mats);

        for (int mstep = 0; mstep < plan.substeps; ++mstep, ++step_index) {
            if (opt.mode == ModelMode::Linearized && opt.op_refresh_substeps > 0 &&
                step_index % opt.op_refresh_substeps == 0) {
                op.cl = x.segment(0, ly.n_locations);
                op.fr = x.segment(ly.n_locations, ly.n_locations);
                op.time = step_index * plan.dt;
                mats = assemble_system(topo, trace, plan, params, k, opt.mode, op, opt.engine);
            }
            mats.set_tank_substep(mstep);
            Eigen::VectorXd u = Eigen::VectorXd::Zero(n_u);
            if (inputs.size() > 0) u = inputs.row(step_index).transpose();
            for (int b = 0; b < n_u; ++b)
                if (u[b] > topo.boosters[b].umax + 1e-12)
                    warn("booster '" + topo.boosters[b].id + "' input " + text::format_g(u[b]) +
                         " exceeds umax at step " + std::to_string(step_index));
            Eigen::VectorXd xn;
            try {
                xn = opt.mode == ModelMode::Nonlinear ? step_nonlinear(x, u, mats)
                                                      : step_linear(x, u, mats);
            } catch (const std::exception& e) {
                throw NumericalError("step failed at WQ step " + std::to_string(step_index) + ": " +
                                     e.what());
            }
            for (int i = 0; i < xn.size(); ++i)
                if (xn[i] < 0) {
                    if (xn[i] < -1e-9) ++out.deep_negative;
                    xn[i] = 0;
                    ++out.clamped_negative;
                }
            x = xn;
            out.states.row(step_index + 1) = x.transpose();
            out.inputs.row(step_index) = u.transpose();
        }
    }
    if (out.clamped_negative > 0)
        warn(std::to_string(out.clamped_negative) + " negative concentrations clamped to zero (" +
             std::to_string(out.deep_negative) + " below -1e-9)");
    return out;
}

inline Trajectory simulate(const NetworkTopology& topo, const HydraulicTrace& trace,
                           const DiscretizationPlan& plan, const ReactionParams& params,
                           const SpeciesInitialState& init, const Eigen::MatrixXd& inputs,
                           const SimOptions& opt = {})
{
    StateLayout ly(topo, plan);
    return simulate(topo, trace, plan, params, expand_initial_state(topo, ly, init), inputs, opt);
}

// Columnar trajectory export: one row per WQ step, one column per
// (species, element) with header labels.
inline std::string serialize_trajectory(const NetworkTopology& topo, const Trajectory& tr)
{
    std::string out = "time";
    for (int i = 0; i < tr.states.cols(); ++i) out += " " + tr.layout.label(topo, i);
    out += "\n";
    for (int k = 0; k <= tr.steps; ++k) {
        out += text::format_g(k * tr.dt);
        for (int i = 0; i < tr.states.cols(); ++i) out += " " + text::format_g(tr.states(k, i));
        out += "\n";
    }
    return out;
}

// Per-pipe scheme-tag sidecar: one row per hydraulic step.
inline std::string serialize_scheme_tags(const NetworkTopology& topo, const Trajectory& tr)
{
    std::string out = "step";
    for (const auto& p : topo.pipes) out += " " + p.id;
    out += "\n";
    for (size_t k = 0; k < tr.scheme_tags.size(); ++k) {
        out += std::to_string(k);
        for (auto s : tr.scheme_tags[k])
            out += std::string(" ") + ((s == SchemeId::LW || s == SchemeId::BE) ? "ADR" : "AR");
        out += "\n";
    }
    return out;
}

// Total chemical mass of one species over the volume-bearing elements
// (pipe segments and tanks). Junctions, pumps and valves hold no volume.
inline double total_mass(const NetworkTopology& topo, const HydraulicTrace& trace,
                         const DiscretizationPlan& plan, const StateLayout& ly,
                         const Eigen::VectorXd& x, Species sp, int hyd_step)
{
    double mass = 0;
    for (int p = 0; p < topo.n_pipes(); ++p) {
        double cell = topo.pipes[p].area() * plan.dx[p];
        for (int s = 0; s < plan.segments[p]; ++s)
            mass += cell * x[ly.state(sp, ly.segment_location(p, s))];
    }
    for (int t = 0; t < topo.n_tanks(); ++t)
        mass += trace.tank_volume(hyd_step, t) * x[ly.state(sp, ly.node_location(topo.node_of_tank(t)))];
    return mass;
}

}  // namespace wqnet

#endif
