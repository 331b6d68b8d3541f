#ifndef WQNET_SCENARIO_HPP
#define WQNET_SCENARIO_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "wqnet/common.hpp"
#include "wqnet/hydraulics.hpp"
#include "wqnet/network.hpp"

namespace wqnet {

// Initial concentrations per species. Node entries are keyed by node id;
// pipe entries hold either a single uniform value or one value per
// segment (expanded against the discretization plan at simulation time).
struct SpeciesInitialState {
    struct SpeciesBlock {
        std::map<std::string, double> node;                // node id -> mg/L
        std::map<std::string, std::vector<double>> pipe;   // pipe id -> uniform (size 1) or per segment
        std::map<std::string, double> link;                // pump/valve id -> mg/L
    };
    std::array<SpeciesBlock, kSpeciesCount> species;

    SpeciesBlock& block(Species s) { return species[static_cast<int>(s)]; }
    const SpeciesBlock& block(Species s) const { return species[static_cast<int>(s)]; }
};

inline SpeciesInitialState load_initial_state(const std::string& path, const NetworkTopology& topo)
{
    TextFile f(path);
    SpeciesInitialState init;
    int current = -1;
    for (size_t i = 0; i < f.size(); ++i) {
        const std::string& line = f.line(i);
        const std::string where = f.where(i);
        if (line.front() == '[') {
            std::string name = line.substr(1, line.size() - 2);
            if (name == "chlorine")
                current = 0;
            else if (name == "reactant")
                current = 1;
            else if (name == "thm")
                current = 2;
            else
                throw ParseError("unknown species section '" + name + "' at " + where);
            continue;
        }
        if (current < 0) throw ParseError("record before any species section at " + where);
        auto toks = text::split_ws(line);
        if (toks.size() < 2) throw ParseError("expected id and value(s) at " + where);
        const std::string& id = toks[0];
        std::vector<double> vals;
        for (size_t t = 1; t < toks.size(); ++t) vals.push_back(text::parse_double(toks[t], where));
        auto& blk = init.species[current];
        if (auto l = topo.find_link(id)) {
            if (topo.link_kind(*l) == LinkKind::Pipe) {
                blk.pipe[id] = vals;
            } else {
                if (vals.size() != 1) throw ParseError("link '" + id + "' takes one value at " + where);
                blk.link[id] = vals[0];
            }
        } else if (topo.find_node(id)) {
            if (vals.size() != 1) throw ParseError("node '" + id + "' takes one value at " + where);
            blk.node[id] = vals[0];
        } else {
            throw ValidationError("initial state names unknown element '" + id + "' at " + where);
        }
    }
    return init;
}

struct ValidationFinding {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;
    bool ok() const { return findings.empty(); }

    std::string to_string() const
    {
        if (findings.empty()) return "valid\n";
        std::string out;
        for (const auto& fd : findings) out += fd.code + ": " + fd.message + "\n";
        return out;
    }
};

// Collects every violated invariant across topology, trace, and initial
// state. Non-throwing: all findings land in the report.
inline ValidationReport validate_scenario(const NetworkTopology& topo, const HydraulicTrace& trace,
                                          const SpeciesInitialState& init)
{
    ValidationReport rep;
    auto add = [&](const std::string& code, const std::string& msg) {
        rep.findings.push_back({code, msg});
    };

    try {
        topo.validate();
    } catch (const ValidationError& e) {
        add("topology", e.what());
    }

    if (trace.pipe_velocity.cols() != topo.n_pipes() || trace.link_flow.cols() != topo.n_links() ||
        trace.demand.cols() != topo.n_junctions() || trace.tank_volume.cols() != topo.n_tanks())
        add("trace-dims", "hydraulic trace dimensions do not match the topology");
    else {
        std::vector<std::string> cont;
        detail::check_continuity(topo, trace, &cont);
        for (const auto& msg : cont) add("continuity", msg);
        // velocity/flow coherence on pipes (advisory)
        for (int k = 0; k < trace.steps; ++k)
            for (int p = 0; p < topo.n_pipes(); ++p) {
                double q = trace.pipe_velocity(k, p) * topo.pipes[p].area();
                double dq = std::abs(q - trace.link_flow(k, p));
                if (dq > 1e-6 + 1e-3 * std::abs(trace.link_flow(k, p))) {
                    add("velocity-flow", "pipe '" + topo.pipes[p].id + "' velocity and flow disagree at step " +
                                             std::to_string(k));
                    k = trace.steps;  // one finding is enough
                    break;
                }
            }
    }

    for (int s = 0; s < kSpeciesCount; ++s) {
        const auto& blk = init.species[s];
        const char* sp = species_name(static_cast<Species>(s));
        for (const auto& [id, v] : blk.node) {
            if (v < 0)
                add("nonnegative", std::string("initial ") + sp + " at node '" + id + "' is negative");
            auto n = topo.find_node(id);
            if (n && topo.node_kind(*n) == NodeKind::Reservoir)
                add("reservoir-fixed", "initial state lists reservoir '" + id +
                                            "'; reservoir concentrations come from the network file");
        }
        for (const auto& [id, v] : blk.link)
            if (v < 0)
                add("nonnegative", std::string("initial ") + sp + " at link '" + id + "' is negative");
        for (const auto& [id, vals] : blk.pipe)
            for (double v : vals)
                if (v < 0) {
                    add("nonnegative", std::string("initial ") + sp + " in pipe '" + id + "' is negative");
                    break;
                }
    }
    return rep;
}

}  // namespace wqnet

#endif
