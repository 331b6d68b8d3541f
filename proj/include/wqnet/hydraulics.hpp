#ifndef WQNET_HYDRAULICS_HPP
#define WQNET_HYDRAULICS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "wqnet/common.hpp"
#include "wqnet/network.hpp"

namespace wqnet {

// Exogenous hydraulic time series driving the water-quality model.
// Velocities and link flows are signed relative to the link's reference
// (from -> to) orientation. Tank volumes are taken at the start of each
// hydraulic step; booster columns hold m^3/s for junction hosts and
// m^3 per hydraulic step for tank hosts.
struct HydraulicTrace {
    double dt_hyd = 0;  // s
    int steps = 0;

    Eigen::MatrixXd pipe_velocity;  // steps x nP, m/s
    Eigen::MatrixXd link_flow;      // steps x nL, m^3/s
    Eigen::MatrixXd demand;         // steps x nJ, m^3/s
    Eigen::MatrixXd tank_volume;    // steps x nTK, m^3 (start of step)
    Eigen::MatrixXd booster_flow;   // steps x nB

    double duration() const { return dt_hyd * steps; }

    // End-of-step volume from the balance over the step.
    double tank_volume_end(const NetworkTopology& topo, int k, int t) const
    {
        double net = 0;
        int node = topo.node_of_tank(t);
        for (int l = 0; l < topo.n_links(); ++l) {
            double q = link_flow(k, l);
            if (topo.link_to(l) == node) net += q;
            if (topo.link_from(l) == node) net -= q;
        }
        double vb = 0;
        for (size_t b = 0; b < topo.boosters.size(); ++b)
            if (topo.boosters[b].node == node) vb += booster_flow(k, static_cast<int>(b));
        return tank_volume(k, t) + net * dt_hyd + vb;
    }
};

// Per-node signed flow view for one hydraulic step.
struct NodeFlows {
    struct In {
        int link;   // link index
        double q;   // magnitude, m^3/s
    };
    std::vector<std::vector<In>> inflow;     // per node
    std::vector<double> outflow_sum;         // per node, links only
    std::vector<double> booster_q;           // per node, junction-booster water inflow

    NodeFlows(const NetworkTopology& topo, const HydraulicTrace& trace, int step)
        : inflow(topo.n_nodes()), outflow_sum(topo.n_nodes(), 0.0), booster_q(topo.n_nodes(), 0.0)
    {
        for (int l = 0; l < topo.n_links(); ++l) {
            double q = trace.link_flow(step, l);
            if (q > 0) {
                inflow[topo.link_to(l)].push_back({l, q});
                outflow_sum[topo.link_from(l)] += q;
            } else if (q < 0) {
                inflow[topo.link_from(l)].push_back({l, -q});
                outflow_sum[topo.link_to(l)] += -q;
            }
        }
        for (size_t b = 0; b < topo.boosters.size(); ++b) {
            const auto& bs = topo.boosters[b];
            if (topo.node_kind(bs.node) == NodeKind::Junction)
                booster_q[bs.node] += trace.booster_flow(step, static_cast<int>(b));
        }
    }
};

namespace detail {

inline void check_continuity(const NetworkTopology& topo, const HydraulicTrace& trace,
                             std::vector<std::string>* findings)
{
    const double rel_tol = 1e-6;
    auto report = [&](const std::string& msg) {
        if (findings)
            findings->push_back(msg);
        else
            throw ValidationError(msg);
    };
    for (int k = 0; k < trace.steps; ++k) {
        NodeFlows nf(topo, trace, k);
        for (int j = 0; j < topo.n_junctions(); ++j) {
            double in = nf.booster_q[j];
            for (const auto& e : nf.inflow[j]) in += e.q;
            double out = trace.demand(k, j) + nf.outflow_sum[j];
            double scale = std::max({in, out, 1e-12});
            if (std::abs(in - out) > rel_tol * scale)
                report("flow continuity violated at step " + std::to_string(k) + ", node '" +
                       topo.junctions[j].id + "' (in=" + text::format_g(in) +
                       ", out=" + text::format_g(out) + ")");
        }
        for (int t = 0; t < topo.n_tanks(); ++t) {
            double v_end = trace.tank_volume_end(topo, k, t);
            double v_next = k + 1 < trace.steps ? trace.tank_volume(k + 1, t) : v_end;
            double scale = std::max({std::abs(v_end), std::abs(v_next), 1e-12});
            if (std::abs(v_end - v_next) > 1e-6 * scale)
                report("tank volume balance violated at step " + std::to_string(k) + ", tank '" +
                       topo.tanks[t].id + "'");
            const auto& ts = topo.tanks[t];
            if (trace.tank_volume(k, t) < ts.vmin - 1e-9 || trace.tank_volume(k, t) > ts.vmax + 1e-9 ||
                v_end < ts.vmin - 1e-9 || v_end > ts.vmax + 1e-9)
                report("tank '" + ts.id + "' volume out of [vmin, vmax] at step " + std::to_string(k));
        }
    }
}

}  // namespace detail

// Loads a columnar hydraulic trace. Header lines: "dt <s>", "steps <n>",
// "columns <name...>"; column names are v:<pipe>, q:<link>, d:<junction>,
// vol:<tank>, qb:<booster> (junction host) or vb:<booster> (tank host).
// One row per hydraulic step, leading step index.
inline HydraulicTrace load_hydraulics(const std::string& path, const NetworkTopology& topo)
{
    TextFile f(path);
    HydraulicTrace tr;
    std::vector<std::string> columns;
    size_t i = 0;
    for (; i < f.size(); ++i) {
        auto toks = text::split_ws(f.line(i));
        if (toks[0] == "dt")
            tr.dt_hyd = text::parse_double(toks.at(1), f.where(i));
        else if (toks[0] == "steps")
            tr.steps = static_cast<int>(text::parse_int(toks.at(1), f.where(i)));
        else if (toks[0] == "columns") {
            columns.assign(toks.begin() + 1, toks.end());
            ++i;
            break;
        } else
            throw ParseError("unexpected header '" + toks[0] + "' at " + f.where(i));
    }
    if (!(tr.dt_hyd > 0)) throw ParseError("hydraulic trace: dt must be > 0 in " + path);
    if (tr.steps <= 0) throw ParseError("hydraulic trace: steps must be > 0 in " + path);

    tr.pipe_velocity.setZero(tr.steps, topo.n_pipes());
    tr.link_flow.setZero(tr.steps, topo.n_links());
    tr.demand.setZero(tr.steps, topo.n_junctions());
    tr.tank_volume.setZero(tr.steps, topo.n_tanks());
    tr.booster_flow.setZero(tr.steps, static_cast<int>(topo.boosters.size()));

    // Resolve each column to its destination array.
    struct Dest {
        Eigen::MatrixXd* mat;
        int col;
    };
    std::vector<Dest> dest;
    std::vector<char> seen_v(topo.n_pipes(), 0), seen_q(topo.n_links(), 0),
        seen_d(topo.n_junctions(), 0), seen_vol(topo.n_tanks(), 0),
        seen_b(topo.boosters.size(), 0);
    for (const auto& name : columns) {
        auto sep = name.find(':');
        if (sep == std::string::npos)
            throw ParseError("hydraulic trace column '" + name + "' must be prefix:id");
        std::string kind = name.substr(0, sep), id = name.substr(sep + 1);
        if (kind == "v") {
            auto l = topo.find_link(id);
            if (!l || topo.link_kind(*l) != LinkKind::Pipe)
                throw ValidationError("trace names unknown pipe '" + id + "'");
            dest.push_back({&tr.pipe_velocity, *l});
            seen_v[*l] = 1;
        } else if (kind == "q") {
            auto l = topo.find_link(id);
            if (!l) throw ValidationError("trace names unknown link '" + id + "'");
            dest.push_back({&tr.link_flow, *l});
            seen_q[*l] = 1;
        } else if (kind == "d") {
            auto n = topo.find_node(id);
            if (!n || topo.node_kind(*n) != NodeKind::Junction)
                throw ValidationError("trace names unknown junction '" + id + "'");
            dest.push_back({&tr.demand, *n});
            seen_d[*n] = 1;
        } else if (kind == "vol") {
            auto n = topo.find_node(id);
            if (!n || topo.node_kind(*n) != NodeKind::Tank)
                throw ValidationError("trace names unknown tank '" + id + "'");
            dest.push_back({&tr.tank_volume, topo.tank_index(*n)});
            seen_vol[topo.tank_index(*n)] = 1;
        } else if (kind == "qb" || kind == "vb") {
            auto b = topo.find_booster(id);
            if (!b) throw ValidationError("trace names unknown booster '" + id + "'");
            bool tank_host = topo.node_kind(topo.boosters[*b].node) == NodeKind::Tank;
            if (tank_host != (kind == "vb"))
                throw ValidationError("booster '" + id + "' column prefix does not match its host kind");
            dest.push_back({&tr.booster_flow, *b});
            seen_b[*b] = 1;
        } else {
            throw ParseError("unknown trace column kind '" + kind + "'");
        }
    }
    auto require_all = [](const std::vector<char>& seen, const std::string& what) {
        for (size_t k = 0; k < seen.size(); ++k)
            if (!seen[k])
                throw ValidationError("trace is missing a " + what + " column (index " +
                                      std::to_string(k) + ")");
    };
    require_all(seen_v, "pipe velocity");
    require_all(seen_q, "link flow");
    require_all(seen_d, "junction demand");
    require_all(seen_vol, "tank volume");
    require_all(seen_b, "booster flow");

    int row = 0;
    for (; i < f.size(); ++i, ++row) {
        auto toks = text::split_ws(f.line(i));
        if (toks.size() != columns.size() + 1)
            throw ParseError("trace row has " + std::to_string(toks.size() - 1) + " values, expected " +
                             std::to_string(columns.size()) + " at " + f.where(i));
        int step = static_cast<int>(text::parse_int(toks[0], f.where(i)));
        if (step != row) throw ParseError("trace rows out of order at " + f.where(i));
        if (row >= tr.steps) throw ParseError("trace has more rows than declared steps at " + f.where(i));
        for (size_t c = 0; c < dest.size(); ++c)
            (*dest[c].mat)(row, dest[c].col) = text::parse_double(toks[c + 1], f.where(i));
    }
    if (row != tr.steps)
        throw ParseError("trace has " + std::to_string(row) + " rows, declared steps " +
                         std::to_string(tr.steps));

    detail::check_continuity(topo, tr, nullptr);
    return tr;
}

inline std::string serialize_hydraulics(const NetworkTopology& topo, const HydraulicTrace& tr)
{
    std::string out = "dt " + text::format_g(tr.dt_hyd) + "\nsteps " + std::to_string(tr.steps) + "\ncolumns";
    for (int p = 0; p < topo.n_pipes(); ++p) out += " v:" + topo.pipes[p].id;
    for (int l = 0; l < topo.n_links(); ++l) out += " q:" + topo.link_id(l);
    for (int j = 0; j < topo.n_junctions(); ++j) out += " d:" + topo.junctions[j].id;
    for (int t = 0; t < topo.n_tanks(); ++t) out += " vol:" + topo.tanks[t].id;
    for (const auto& b : topo.boosters)
        out += (topo.node_kind(b.node) == NodeKind::Tank ? " vb:" : " qb:") + b.id;
    out += "\n";
    for (int k = 0; k < tr.steps; ++k) {
        out += std::to_string(k);
        for (int p = 0; p < topo.n_pipes(); ++p) out += " " + text::format_g(tr.pipe_velocity(k, p));
        for (int l = 0; l < topo.n_links(); ++l) out += " " + text::format_g(tr.link_flow(k, l));
        for (int j = 0; j < topo.n_junctions(); ++j) out += " " + text::format_g(tr.demand(k, j));
        for (int t = 0; t < topo.n_tanks(); ++t) out += " " + text::format_g(tr.tank_volume(k, t));
        for (size_t b = 0; b < topo.boosters.size(); ++b)
            out += " " + text::format_g(tr.booster_flow(k, static_cast<int>(b)));
        out += "\n";
    }
    return out;
}

}  // namespace wqnet

#endif
