#ifndef WQNET_LAYOUT_HPP
#define WQNET_LAYOUT_HPP

#include <string>
#include <vector>

#include "wqnet/network.hpp"
#include "wqnet/plan.hpp"

namespace wqnet {

// Bijection between (species, element, segment) and state indices.
// Location order within each species block: junctions, reservoirs,
// tanks, pumps, valves, then pipe segments (pipes by index, segments in
// reference orientation). States are species-major: index = species *
// n_locations + location.
struct StateLayout {
    int n_junctions = 0, n_reservoirs = 0, n_tanks = 0, n_pumps = 0, n_valves = 0;
    std::vector<int> pipe_offset;    // location of segment 0, per pipe
    std::vector<int> pipe_segments;  // s_L per pipe
    int n_locations = 0;             // n_x = n_N + n_L

    StateLayout() = default;
    StateLayout(const NetworkTopology& topo, const DiscretizationPlan& plan)
    {
        n_junctions = topo.n_junctions();
        n_reservoirs = topo.n_reservoirs();
        n_tanks = topo.n_tanks();
        n_pumps = topo.n_pumps();
        n_valves = topo.n_valves();
        int loc = n_junctions + n_reservoirs + n_tanks + n_pumps + n_valves;
        pipe_offset.resize(plan.segments.size());
        pipe_segments = plan.segments;
        for (size_t p = 0; p < plan.segments.size(); ++p) {
            pipe_offset[p] = loc;
            loc += plan.segments[p];
        }
        n_locations = loc;
    }

    int dimension() const { return kSpeciesCount * n_locations; }

    int node_location(int node) const { return node; }  // junctions, reservoirs, tanks share node order
    int pump_location(int m) const { return n_junctions + n_reservoirs + n_tanks + m; }
    int valve_location(int v) const { return n_junctions + n_reservoirs + n_tanks + n_pumps + v; }
    int segment_location(int pipe, int seg) const { return pipe_offset[pipe] + seg; }

    int state(Species sp, int location) const { return static_cast<int>(sp) * n_locations + location; }

    bool is_segment(int location) const
    {
        return location >= n_junctions + n_reservoirs + n_tanks + n_pumps + n_valves;
    }
    bool is_tank(int location) const
    {
        return location >= n_junctions + n_reservoirs && location < n_junctions + n_reservoirs + n_tanks;
    }

    // Human-readable column label for exports, e.g. cl:J1 or fr:P2:3.
    std::string label(const NetworkTopology& topo, int state_index) const
    {
        Species sp = static_cast<Species>(state_index / n_locations);
        int loc = state_index % n_locations;
        std::string name;
        int n_nodes = n_junctions + n_reservoirs + n_tanks;
        if (loc < n_nodes) {
            name = topo.node_id(loc);
        } else if (loc < n_nodes + n_pumps) {
            name = topo.pumps[loc - n_nodes].id;
        } else if (loc < n_nodes + n_pumps + n_valves) {
            name = topo.valves[loc - n_nodes - n_pumps].id;
        } else {
            for (size_t p = 0; p < pipe_offset.size(); ++p) {
                if (loc >= pipe_offset[p] && loc < pipe_offset[p] + pipe_segments[p]) {
                    name = topo.pipes[p].id + ":" + std::to_string(loc - pipe_offset[p]);
                    break;
                }
            }
        }
        return std::string(species_prefix(sp)) + ":" + name;
    }
};

}  // namespace wqnet

#endif
