#ifndef WQNET_ASSEMBLY_HPP
#define WQNET_ASSEMBLY_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <vector>

#include "wqnet/common.hpp"
#include "wqnet/hydraulics.hpp"
#include "wqnet/layout.hpp"
#include "wqnet/network.hpp"
#include "wqnet/plan.hpp"
#include "wqnet/reactions.hpp"
#include "wqnet/transport.hpp"

namespace wqnet {

enum class ModelMode { Nonlinear, Linearized };
enum class TransportSelect { Auto, AdvectionOnly, AdvectionDispersion };

struct EngineOptions {
    TransportSelect transport = TransportSelect::Auto;
    TransportConfig transport_cfg;  // Peclet threshold is taken from the plan
    std::vector<std::string> monitored_nodes;  // empty: all junctions and tanks
};

using SpMat = Eigen::SparseMatrix<double>;

// Time-varying state-space system for one hydraulic step:
//   E x(t+dt) = A x(t) + B u(t) + f(x(t))        (nonlinear)
//   E x(t+dt) = A x(t) + B u(t) + phi            (linearized; A is A~)
// f(x) = fmap * r(x) with r the raw per-state reaction rates on pipe
// segments and tanks. Tank rows depend on the in-step volume, so their
// coefficients are refreshed per WQ substep via set_tank_substep.
class SystemMatrices {
public:
    StateLayout layout;
    SchemeFamily family = SchemeFamily::Explicit;
    ModelMode mode = ModelMode::Nonlinear;
    double dt = 0;
    int substeps = 0;
    int hyd_step = 0;

    SpMat E, A, B, C, fmap;
    Eigen::VectorXd phi;
    Eigen::VectorXd decay_rate;           // per location; segments and tanks
    std::vector<int> reactive_locations;  // locations with reaction terms
    std::vector<SchemeId> pipe_scheme;
    std::vector<FlowRegimeSample> regime;  // per pipe at this hydraulic step
    std::vector<int> monitored_locations;  // node locations exposed by C

    bool explicit_family() const { return family == SchemeFamily::Explicit; }

    struct TankDrive {
        int tank = -1;
        int location = -1;
        double v0 = 0;      // volume at substep 0
        double dv = 0;      // volume change per substep
        double qout = 0;    // total outflow, m^3/s
        std::vector<std::pair<int, double>> inflow;    // (source location, q)
        std::vector<std::pair<int, double>> boosters;  // (input column, m^3 per WQ step)
    };
    std::vector<TankDrive> tanks;

    // Rewrites tank-row coefficients for WQ substep m of this hydraulic
    // step. Cheap: touches only n_TK rows per species.
    void set_tank_substep(int m)
    {
        if (tanks.empty() || m == current_substep_) return;
        current_substep_ = m;
        for (const auto& td : tanks) {
            double v_now = td.v0 + m * td.dv;
            double v_next = td.v0 + (m + 1) * td.dv;
            double self = (v_now - td.qout * dt) / v_next;
            double fscale = v_now * dt / v_next;
            double k = decay_rate[td.location];
            for (int s = 0; s < kSpeciesCount; ++s) {
                int row = layout.state(static_cast<Species>(s), td.location);
                A.coeffRef(row, row) = self;
                for (const auto& [src, q] : td.inflow)
                    A.coeffRef(row, layout.state(static_cast<Species>(s), src)) = q * dt / v_next;
                if (mode == ModelMode::Nonlinear) {
                    fmap.coeffRef(row, row) = fscale;
                } else {
                    auto l = linearized_reaction(k, reaction_, op_cl_[td.location], op_fr_[td.location]);
                    int cl = layout.state(Species::Chlorine, td.location);
                    int fr = layout.state(Species::Reactant, td.location);
                    double dc, dfr, cst;
                    switch (static_cast<Species>(s)) {
                        case Species::Chlorine: dc = l.dcl_dc; dfr = l.dcl_dfr; cst = l.cl_const; break;
                        case Species::Reactant: dc = l.dfr_dc; dfr = l.dfr_dfr; cst = l.fr_const; break;
                        default: dc = l.dthm_dc; dfr = l.dthm_dfr; cst = l.thm_const; break;
                    }
                    A.coeffRef(row, cl) = (cl == row ? self : 0.0) + fscale * dc;
                    A.coeffRef(row, fr) = (fr == row ? self : 0.0) + fscale * dfr;
                    phi[row] = fscale * cst;
                }
            }
            for (const auto& [col, vb_step] : td.boosters)
                B.coeffRef(booster_rows_.at(col), col) = vb_step / v_next;
        }
    }

    void factorize()
    {
        if (family == SchemeFamily::Explicit) return;
        lu_ = std::make_unique<Eigen::SparseLU<SpMat>>();
        E.makeCompressed();
        lu_->analyzePattern(E);
        lu_->factorize(E);
        if (lu_->info() != Eigen::Success)
            throw NumericalError("E factorization failed at hydraulic step " + std::to_string(hyd_step) +
                                 ": matrix is singular or ill-conditioned");
    }

    Eigen::VectorXd solve_e(const Eigen::VectorXd& rhs) const
    {
        if (family == SchemeFamily::Explicit) return rhs;
        if (!lu_) throw NumericalError("E not factorized");
        Eigen::VectorXd x = lu_->solve(rhs);
        if (lu_->info() != Eigen::Success)
            throw NumericalError("E solve failed at hydraulic step " + std::to_string(hyd_step));
        return x;
    }

    Eigen::MatrixXd solve_e(const Eigen::MatrixXd& rhs) const
    {
        if (family == SchemeFamily::Explicit) return rhs;
        if (!lu_) throw NumericalError("E not factorized");
        return lu_->solve(rhs);
    }

    // assembly-time hooks
    void set_reaction(const ReactionParams& p) { reaction_ = p; }
    const ReactionParams& reaction() const { return reaction_; }
    void set_operating_point(const Eigen::VectorXd& cl, const Eigen::VectorXd& fr)
    {
        op_cl_ = cl;
        op_fr_ = fr;
    }
    void map_booster_row(int col, int row) { booster_rows_[col] = row; }
    void reset_substep_cache() { current_substep_ = -1; }

private:
    ReactionParams reaction_;
    Eigen::VectorXd op_cl_, op_fr_;  // per location, linearized mode
    std::map<int, int> booster_rows_;
    int current_substep_ = -1;
    std::unique_ptr<Eigen::SparseLU<SpMat>> lu_;
};

/// Raw reaction rates r(x): nonzero on pipe-segment and tank states.
inline Eigen::VectorXd raw_reactions(const Eigen::VectorXd& x, const SystemMatrices& m)
{
    const auto& ly = m.layout;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(ly.dimension());
    for (int loc : m.reactive_locations) {
        double cl = x[ly.state(Species::Chlorine, loc)];
        double fr = x[ly.state(Species::Reactant, loc)];
        auto t = reaction_terms(cl, fr, m.decay_rate[loc], m.reaction());
        r[ly.state(Species::Chlorine, loc)] = t.cl;
        r[ly.state(Species::Reactant, loc)] = t.fr;
        r[ly.state(Species::Thm, loc)] = t.thm;
    }
    return r;
}

namespace detail {

// Sparse rows under construction; composition-friendly.
struct RowSet {
    std::vector<std::vector<std::pair<int, double>>> rows;
    explicit RowSet(int n) : rows(n) {}
    void add(int r, int c, double v)
    {
        if (v == 0.0) return;
        for (auto& e : rows[r])
            if (e.first == c) {
                e.second += v;
                return;
            }
        rows[r].emplace_back(c, v);
    }
    void add_scaled(int dst, const std::vector<std::pair<int, double>>& src, double w)
    {
        for (const auto& e : src) add(dst, e.first, w * e.second);
    }
    SpMat to_sparse(int nrows, int ncols) const
    {
        std::vector<Eigen::Triplet<double>> trip;
        for (int r = 0; r < static_cast<int>(rows.size()); ++r)
            for (const auto& e : rows[r]) trip.emplace_back(r, e.first, e.second);
        SpMat m(nrows, ncols);
        m.setFromTriplets(trip.begin(), trip.end());
        return m;
    }
};

// Order in which explicit junction/pump/valve rows can be composed from
// already-final rows. Nodes: junction locations and pump/valve locations.
inline std::vector<int> copy_order(const NetworkTopology& topo, const StateLayout& ly,
                                   const NodeFlows& nf, const HydraulicTrace& trace, int step)
{
    // vertex = location; edges: junction <- inflow pump/valve; pump/valve <- upstream junction
    std::map<int, std::vector<int>> dependents;  // loc -> locs that wait on it
    std::map<int, int> pending;                  // loc -> unmet deps
    std::vector<int> verts;
    auto add_vert = [&](int loc) {
        pending.emplace(loc, 0);
        verts.push_back(loc);
    };
    for (int j = 0; j < topo.n_junctions(); ++j) add_vert(ly.node_location(j));
    for (int m = 0; m < topo.n_pumps(); ++m) add_vert(ly.pump_location(m));
    for (int v = 0; v < topo.n_valves(); ++v) add_vert(ly.valve_location(v));

    auto link_loc = [&](int l) {
        return topo.link_kind(l) == LinkKind::Pump ? ly.pump_location(l - topo.n_pipes())
                                                   : ly.valve_location(l - topo.n_pipes() - topo.n_pumps());
    };
    for (int j = 0; j < topo.n_junctions(); ++j) {
        for (const auto& e : nf.inflow[j]) {
            if (topo.link_kind(e.link) == LinkKind::Pipe) continue;
            int dep = link_loc(e.link);
            dependents[dep].push_back(ly.node_location(j));
            ++pending[ly.node_location(j)];
        }
    }
    for (int l = topo.n_pipes(); l < topo.n_links(); ++l) {
        double q = trace.link_flow(step, l);
        if (std::abs(q) <= 1e-12) continue;  // idle link holds its value
        int up = q > 0 ? topo.link_from(l) : topo.link_to(l);
        if (topo.node_kind(up) == NodeKind::Junction) {
            dependents[ly.node_location(up)].push_back(link_loc(l));
            ++pending[link_loc(l)];
        }
    }
    std::vector<int> order, ready;
    for (int v : verts)
        if (pending[v] == 0) ready.push_back(v);
    while (!ready.empty()) {
        int v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (int d : dependents[v])
            if (--pending[d] == 0) ready.push_back(d);
    }
    if (order.size() != verts.size())
        throw NumericalError("cycle of zero-length links (pumps/valves) is not supported");
    return order;
}

}  // namespace detail

// Builds E, A (or A~), B, C, phi and the reaction map for one hydraulic
// step. Pipe rows follow the selected scheme per pipe (AR vs ADR decided
// by the Peclet test unless forced); junction rows apply the
// instantaneous mixing balance; tank rows the CSTR balance; reservoirs
// are identity; pumps and valves copy their upstream node.
inline SystemMatrices assemble_system(const NetworkTopology& topo, const HydraulicTrace& trace,
                                      const DiscretizationPlan& plan, const ReactionParams& params,
                                      int hyd_step, ModelMode mode, const OperatingPoint& op,
                                      const EngineOptions& opt = {})
{
    if (hyd_step < 0 || hyd_step >= trace.steps)
        throw NumericalError("hydraulic step index out of range");

    SystemMatrices m;
    m.layout = StateLayout(topo, plan);
    m.family = plan.family;
    m.mode = mode;
    m.dt = plan.dt;
    m.substeps = plan.substeps;
    m.hyd_step = hyd_step;
    m.set_reaction(params);

    const StateLayout& ly = m.layout;
    const int dim = ly.dimension();
    const int n_inputs = static_cast<int>(topo.boosters.size());

    TransportConfig tcfg = opt.transport_cfg;
    tcfg.peclet_threshold = plan.peclet_threshold;

    // decay rates and reactive locations
    m.decay_rate = Eigen::VectorXd::Zero(ly.n_locations);
    for (int t = 0; t < topo.n_tanks(); ++t) {
        int loc = ly.node_location(topo.node_of_tank(t));
        m.decay_rate[loc] = tank_decay_rate(topo.tanks[t]);
        m.reactive_locations.push_back(loc);
    }
    for (int p = 0; p < topo.n_pipes(); ++p) {
        double k = pipe_decay_rate(topo.pipes[p]);
        for (int s = 0; s < plan.segments[p]; ++s) {
            int loc = ly.segment_location(p, s);
            m.decay_rate[loc] = k;
            m.reactive_locations.push_back(loc);
        }
    }

    detail::RowSet a_rows(dim), b_rows(dim), f_rows(dim);
    std::vector<Eigen::Triplet<double>> e_trip;
    const bool expl = plan.family == SchemeFamily::Explicit;

    NodeFlows nf(topo, trace, hyd_step);

    // --- pipe segment rows ---
    m.pipe_scheme.resize(topo.n_pipes());
    m.regime.resize(topo.n_pipes());
    for (int p = 0; p < topo.n_pipes(); ++p) {
        const PipeSpec& ps = topo.pipes[p];
        double v = trace.pipe_velocity(hyd_step, p);
        auto sample = flow_regime_sample(topo, p, hyd_step, v, tcfg);
        m.regime[p] = sample;

        bool adr;
        switch (opt.transport) {
            case TransportSelect::AdvectionOnly: adr = false; break;
            case TransportSelect::AdvectionDispersion: adr = true; break;
            default: adr = sample.dispersion_active; break;
        }
        SchemeId scheme = expl ? (adr ? SchemeId::LW : SchemeId::EU)
                               : (adr ? SchemeId::BE : SchemeId::IU);
        m.pipe_scheme[p] = scheme;

        const int sl = plan.segments[p];
        const double dx = plan.dx[p];
        const bool stagnant = sample.speed < kStagnantVelocity;

        if (stagnant) {
            for (int s = 0; s < sl; ++s) {
                int loc = ly.segment_location(p, s);
                for (int sp = 0; sp < kSpeciesCount; ++sp) {
                    int row = ly.state(static_cast<Species>(sp), loc);
                    e_trip.emplace_back(row, row, 1.0);
                    a_rows.add(row, row, 1.0);
                    f_rows.add(row, row, plan.dt);
                }
            }
            continue;
        }

        double lam = sample.speed * plan.dt / dx;
        double alpha = adr ? sample.dispersion * plan.dt / (dx * dx) : 0.0;
        auto coeff = stencil_coefficients(scheme, lam, alpha);

        bool forward = v > 0;
        int up_node = forward ? ps.from : ps.to;
        int dn_node = forward ? ps.to : ps.from;
        for (int j = 0; j < sl; ++j) {  // j = position in flow order
            int seg = forward ? j : sl - 1 - j;
            int loc = ly.segment_location(p, seg);
            int up_loc = j == 0 ? ly.node_location(up_node)
                                : ly.segment_location(p, forward ? j - 1 : sl - j);
            int dn_loc = j == sl - 1 ? ly.node_location(dn_node)
                                     : ly.segment_location(p, forward ? j + 1 : sl - j - 2);
            for (int sp = 0; sp < kSpeciesCount; ++sp) {
                auto st = [&](int l) { return ly.state(static_cast<Species>(sp), l); };
                int row = st(loc);
                const int cols[3] = {st(up_loc), st(loc), st(dn_loc)};
                if (expl) {
                    e_trip.emplace_back(row, row, 1.0);
                } else {
                    for (int c = 0; c < 3; ++c)
                        if (coeff.row.lhs[c] != 0.0) e_trip.emplace_back(row, cols[c], coeff.row.lhs[c]);
                }
                for (int c = 0; c < 3; ++c)
                    if (coeff.row.rhs[c] != 0.0) a_rows.add(row, cols[c], coeff.row.rhs[c]);
                f_rows.add(row, row, plan.dt);
            }
        }
    }

    // --- reservoir rows: identity dynamics ---
    for (int r = 0; r < topo.n_reservoirs(); ++r) {
        int loc = ly.node_location(topo.node_of_reservoir(r));
        for (int sp = 0; sp < kSpeciesCount; ++sp) {
            int row = ly.state(static_cast<Species>(sp), loc);
            e_trip.emplace_back(row, row, 1.0);
            a_rows.add(row, row, 1.0);
        }
    }

    // --- tank rows (explicit in both families) ---
    for (int t = 0; t < topo.n_tanks(); ++t) {
        int node = topo.node_of_tank(t);
        int loc = ly.node_location(node);
        SystemMatrices::TankDrive td;
        td.tank = t;
        td.location = loc;
        double v_start = trace.tank_volume(hyd_step, t);
        double v_end = trace.tank_volume_end(topo, hyd_step, t);
        td.v0 = v_start;
        td.dv = (v_end - v_start) / plan.substeps;
        td.qout = nf.outflow_sum[node];
        for (const auto& e : nf.inflow[node]) {
            int src;
            if (topo.link_kind(e.link) == LinkKind::Pipe) {
                bool into_to = topo.link_to(e.link) == node && trace.link_flow(hyd_step, e.link) > 0;
                src = ly.segment_location(e.link, into_to ? plan.segments[e.link] - 1 : 0);
            } else if (topo.link_kind(e.link) == LinkKind::Pump) {
                src = ly.pump_location(e.link - topo.n_pipes());
            } else {
                src = ly.valve_location(e.link - topo.n_pipes() - topo.n_pumps());
            }
            td.inflow.emplace_back(src, e.q);
        }
        for (int b = 0; b < n_inputs; ++b)
            if (topo.boosters[b].node == node) {
                double vb_step = trace.booster_flow(hyd_step, b) / plan.substeps;  // m^3 per WQ step
                td.boosters.emplace_back(b, vb_step);
                m.map_booster_row(b, ly.state(topo.boosters[b].species, loc));
            }
        m.tanks.push_back(td);

        // insert placeholder entries; set_tank_substep writes the values
        for (int sp = 0; sp < kSpeciesCount; ++sp) {
            int row = ly.state(static_cast<Species>(sp), loc);
            e_trip.emplace_back(row, row, 1.0);
            a_rows.add(row, row, 1.0);  // placeholder self coefficient
            for (const auto& [src, q] : td.inflow) {
                (void)q;
                a_rows.add(row, ly.state(static_cast<Species>(sp), src), 1e-300);
            }
            if (mode == ModelMode::Nonlinear) {
                f_rows.add(row, row, 1e-300);
            } else {
                a_rows.add(row, ly.state(Species::Chlorine, loc), 1e-300);
                a_rows.add(row, ly.state(Species::Reactant, loc), 1e-300);
            }
        }
        for (const auto& [b, vb] : td.boosters) {
            (void)vb;
            b_rows.add(ly.state(topo.boosters[b].species, loc), b, 1e-300);
        }
    }

    // --- junction, pump and valve rows ---
    auto junction_denominator = [&](int j) {
        return trace.demand(hyd_step, j) + nf.outflow_sum[ly.node_location(j)];
    };
    auto source_location = [&](const NodeFlows::In& e, int node) {
        if (topo.link_kind(e.link) == LinkKind::Pipe) {
            bool into_to = topo.link_to(e.link) == node && trace.link_flow(hyd_step, e.link) > 0;
            return ly.segment_location(e.link, into_to ? plan.segments[e.link] - 1 : 0);
        }
        if (topo.link_kind(e.link) == LinkKind::Pump) return ly.pump_location(e.link - topo.n_pipes());
        return ly.valve_location(e.link - topo.n_pipes() - topo.n_pumps());
    };

    if (!expl) {
        const double flow_eps = 1e-12;
        for (int j = 0; j < topo.n_junctions(); ++j) {
            int loc = ly.node_location(j);
            double q_total = junction_denominator(j);
            for (int sp = 0; sp < kSpeciesCount; ++sp) {
                int row = ly.state(static_cast<Species>(sp), loc);
                e_trip.emplace_back(row, row, 1.0);
                if (q_total <= flow_eps) {  // stagnant junction holds its value
                    a_rows.add(row, row, 1.0);
                    continue;
                }
                for (const auto& e : nf.inflow[loc])
                    e_trip.emplace_back(row, ly.state(static_cast<Species>(sp), source_location(e, loc)),
                                        -e.q / q_total);
            }
            if (q_total > flow_eps)
                for (int b = 0; b < n_inputs; ++b)
                    if (topo.boosters[b].node == loc) {
                        int row = ly.state(topo.boosters[b].species, loc);
                        b_rows.add(row, b, trace.booster_flow(hyd_step, b) / q_total);
                        m.map_booster_row(b, row);
                    }
        }
        // pumps/valves copy the upstream node at t+dt
        for (int l = topo.n_pipes(); l < topo.n_links(); ++l) {
            double q = trace.link_flow(hyd_step, l);
            int loc = topo.link_kind(l) == LinkKind::Pump
                          ? ly.pump_location(l - topo.n_pipes())
                          : ly.valve_location(l - topo.n_pipes() - topo.n_pumps());
            for (int sp = 0; sp < kSpeciesCount; ++sp) {
                int row = ly.state(static_cast<Species>(sp), loc);
                e_trip.emplace_back(row, row, 1.0);
                if (std::abs(q) <= 1e-12) {
                    a_rows.add(row, row, 1.0);  // idle link holds its value
                } else {
                    int up = q > 0 ? topo.link_from(l) : topo.link_to(l);
                    e_trip.emplace_back(row, ly.state(static_cast<Species>(sp), ly.node_location(up)), -1.0);
                }
            }
        }
    } else {
        // Explicit family: E stays identity, so junction/pump/valve values
        // at t+dt are substituted from the already-built explicit rows of
        // their sources. This realizes the instantaneous mixing balance
        // with every right-hand side still evaluated at time t.
        auto order = detail::copy_order(topo, ly, nf, trace, hyd_step);
        const double flow_eps = 1e-12;
        for (int loc : order) {
            if (loc < topo.n_junctions()) {  // junction
                int j = loc;
                double q_total = junction_denominator(j);
                for (int sp = 0; sp < kSpeciesCount; ++sp) {
                    int row = ly.state(static_cast<Species>(sp), loc);
                    e_trip.emplace_back(row, row, 1.0);
                    if (q_total <= flow_eps) {
                        a_rows.add(row, row, 1.0);
                        continue;
                    }
                    for (const auto& e : nf.inflow[loc]) {
                        int src_state = ly.state(static_cast<Species>(sp), source_location(e, loc));
                        a_rows.add_scaled(row, a_rows.rows[src_state], e.q / q_total);
                        b_rows.add_scaled(row, b_rows.rows[src_state], e.q / q_total);
                        f_rows.add_scaled(row, f_rows.rows[src_state], e.q / q_total);
                    }
                }
                if (q_total > flow_eps)
                    for (int b = 0; b < n_inputs; ++b)
                        if (topo.boosters[b].node == loc) {
                            int row = ly.state(topo.boosters[b].species, loc);
                            b_rows.add(row, b, trace.booster_flow(hyd_step, b) / q_total);
                            m.map_booster_row(b, row);
                        }
            } else {  // pump or valve
                int pv_base = topo.n_junctions() + topo.n_reservoirs() + topo.n_tanks();
                int l = loc < pv_base + topo.n_pumps()
                            ? topo.n_pipes() + (loc - pv_base)
                            : topo.n_pipes() + topo.n_pumps() + (loc - pv_base - topo.n_pumps());
                double q = trace.link_flow(hyd_step, l);
                for (int sp = 0; sp < kSpeciesCount; ++sp) {
                    int row = ly.state(static_cast<Species>(sp), loc);
                    e_trip.emplace_back(row, row, 1.0);
                    if (std::abs(q) <= 1e-12) {
                        a_rows.add(row, row, 1.0);
                        continue;
                    }
                    int up = q > 0 ? topo.link_from(l) : topo.link_to(l);
                    int up_loc = ly.node_location(up);
                    if (topo.node_kind(up) == NodeKind::Junction) {
                        int src_state = ly.state(static_cast<Species>(sp), up_loc);
                        a_rows.add_scaled(row, a_rows.rows[src_state], 1.0);
                        b_rows.add_scaled(row, b_rows.rows[src_state], 1.0);
                        f_rows.add_scaled(row, f_rows.rows[src_state], 1.0);
                    } else {
                        // reservoir: constant, copy is exact; tank: the tank
                        // discharges at its time-t concentration, so the
                        // lagged copy matches the CSTR outflux accounting
                        a_rows.add(row, ly.state(static_cast<Species>(sp), up_loc), 1.0);
                    }
                }
            }
        }
    }

    // --- linearized reaction folding on pipe segments ---
    // (tank rows are folded inside set_tank_substep)
    m.phi = Eigen::VectorXd::Zero(dim);
    if (mode == ModelMode::Linearized) {
        if (op.cl.size() != ly.n_locations || op.fr.size() != ly.n_locations)
            throw NumericalError("operating point size does not match the layout");
        m.set_operating_point(op.cl, op.fr);
        detail::RowSet jr(dim);
        Eigen::VectorXd rconst = Eigen::VectorXd::Zero(dim);
        for (int loc : m.reactive_locations) {
            if (ly.is_tank(loc)) continue;
            auto l = linearized_reaction(m.decay_rate[loc], params, op.cl[loc], op.fr[loc]);
            int cl = ly.state(Species::Chlorine, loc);
            int fr = ly.state(Species::Reactant, loc);
            int th = ly.state(Species::Thm, loc);
            jr.add(cl, cl, l.dcl_dc);
            jr.add(cl, fr, l.dcl_dfr);
            rconst[cl] = l.cl_const;
            jr.add(fr, cl, l.dfr_dc);
            jr.add(fr, fr, l.dfr_dfr);
            rconst[fr] = l.fr_const;
            jr.add(th, cl, l.dthm_dc);
            jr.add(th, fr, l.dthm_dfr);
            rconst[th] = l.thm_const;
        }
        SpMat jr_mat = jr.to_sparse(dim, dim);
        SpMat fm = f_rows.to_sparse(dim, dim);
        SpMat folded = fm * jr_mat;
        // A~ = A + fmap * Jr
        for (int k = 0; k < folded.outerSize(); ++k)
            for (SpMat::InnerIterator it(folded, k); it; ++it)
                a_rows.add(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        m.phi = fm * rconst;
        m.fmap = fm;  // retained for diagnostics
    }

    m.A = a_rows.to_sparse(dim, dim);
    m.B = b_rows.to_sparse(dim, n_inputs);
    if (mode == ModelMode::Nonlinear) m.fmap = f_rows.to_sparse(dim, dim);
    m.E = SpMat(dim, dim);
    m.E.setFromTriplets(e_trip.begin(), e_trip.end());

    // --- sensor matrix: junction and tank chlorine states by default ---
    std::vector<int> mon;
    if (opt.monitored_nodes.empty()) {
        for (int j = 0; j < topo.n_junctions(); ++j) mon.push_back(ly.node_location(j));
        for (int t = 0; t < topo.n_tanks(); ++t) mon.push_back(ly.node_location(topo.node_of_tank(t)));
    } else {
        for (const auto& id : opt.monitored_nodes) {
            auto n = topo.find_node(id);
            if (!n) throw ValidationError("monitored node '" + id + "' does not exist");
            mon.push_back(ly.node_location(*n));
        }
    }
    m.monitored_locations = mon;
    std::vector<Eigen::Triplet<double>> c_trip;
    for (size_t i = 0; i < mon.size(); ++i)
        c_trip.emplace_back(static_cast<int>(i), ly.state(Species::Chlorine, mon[i]), 1.0);
    m.C = SpMat(static_cast<int>(mon.size()), dim);
    m.C.setFromTriplets(c_trip.begin(), c_trip.end());

    m.reset_substep_cache();
    m.set_tank_substep(0);
    if (plan.family == SchemeFamily::Implicit) m.factorize();
    return m;
}

inline SystemMatrices assemble_system(const NetworkTopology& topo, const HydraulicTrace& trace,
                                      const DiscretizationPlan& plan, const ReactionParams& params,
                                      int hyd_step, const EngineOptions& opt = {})
{
    OperatingPoint unused;
    unused.cl = Eigen::VectorXd::Zero(StateLayout(topo, plan).n_locations);
    unused.fr = unused.cl;
    return assemble_system(topo, trace, plan, params, hyd_step, ModelMode::Nonlinear, unused, opt);
}

}  // namespace wqnet

#endif
