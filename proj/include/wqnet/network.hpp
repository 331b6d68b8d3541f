#ifndef WQNET_NETWORK_HPP
#define WQNET_NETWORK_HPP

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wqnet/common.hpp"

namespace wqnet {

enum class NodeKind { Junction, Reservoir, Tank };
enum class LinkKind { Pipe, Pump, Valve };

struct JunctionSpec {
    std::string id;
};

// Reservoirs hold a fixed source concentration per species (mg/L).
struct ReservoirSpec {
    std::string id;
    std::array<double, kSpeciesCount> source{0.0, 0.0, 0.0};
};

struct TankSpec {
    std::string id;
    double vmin = 0;  // m^3
    double vmax = 0;
    double v0 = 0;
    double kb = 0;  // bulk reaction rate, 1/s
};

struct PipeSpec {
    std::string id;
    int from = -1;  // global node index
    int to = -1;
    double length = 0;    // m
    double diameter = 0;  // m
    double kb = 0;        // bulk rate, 1/s
    double kw = 0;        // wall rate, 1/s
    double kf = 0;        // mass-transfer coefficient
    double dm = 1.3e-9;   // molecular diffusion, m^2/s

    double area() const { return 0.25 * 3.14159265358979323846 * diameter * diameter; }
    double radius() const { return 0.5 * diameter; }
};

struct LinkSpec {  // pump or valve: zero-length transmission element
    std::string id;
    int from = -1;
    int to = -1;
};

struct BoosterSpec {
    std::string id;
    int node = -1;  // global node index of the host (junction or tank)
    double umax = 0;  // mg/L
    Species species = Species::Chlorine;
};

// Directed network graph. Global node indices run junctions first, then
// reservoirs, then tanks; link indices run pipes, pumps, valves. That
// ordering is shared with the state layout.
struct NetworkTopology {
    std::vector<JunctionSpec> junctions;
    std::vector<ReservoirSpec> reservoirs;
    std::vector<TankSpec> tanks;
    std::vector<PipeSpec> pipes;
    std::vector<LinkSpec> pumps;
    std::vector<LinkSpec> valves;
    std::vector<BoosterSpec> boosters;

    int n_junctions() const { return static_cast<int>(junctions.size()); }
    int n_reservoirs() const { return static_cast<int>(reservoirs.size()); }
    int n_tanks() const { return static_cast<int>(tanks.size()); }
    int n_pipes() const { return static_cast<int>(pipes.size()); }
    int n_pumps() const { return static_cast<int>(pumps.size()); }
    int n_valves() const { return static_cast<int>(valves.size()); }
    int n_nodes() const { return n_junctions() + n_reservoirs() + n_tanks(); }
    int n_links() const { return n_pipes() + n_pumps() + n_valves(); }

    NodeKind node_kind(int n) const
    {
        if (n < n_junctions()) return NodeKind::Junction;
        if (n < n_junctions() + n_reservoirs()) return NodeKind::Reservoir;
        return NodeKind::Tank;
    }
    int junction_index(int n) const { return n; }
    int reservoir_index(int n) const { return n - n_junctions(); }
    int tank_index(int n) const { return n - n_junctions() - n_reservoirs(); }
    int node_of_tank(int t) const { return n_junctions() + n_reservoirs() + t; }
    int node_of_reservoir(int r) const { return n_junctions() + r; }

    const std::string& node_id(int n) const
    {
        switch (node_kind(n)) {
            case NodeKind::Junction: return junctions[n].id;
            case NodeKind::Reservoir: return reservoirs[reservoir_index(n)].id;
            default: return tanks[tank_index(n)].id;
        }
    }

    // link index: pipes [0, nP), pumps [nP, nP+nM), valves [nP+nM, nL)
    LinkKind link_kind(int l) const
    {
        if (l < n_pipes()) return LinkKind::Pipe;
        if (l < n_pipes() + n_pumps()) return LinkKind::Pump;
        return LinkKind::Valve;
    }
    int link_from(int l) const
    {
        switch (link_kind(l)) {
            case LinkKind::Pipe: return pipes[l].from;
            case LinkKind::Pump: return pumps[l - n_pipes()].from;
            default: return valves[l - n_pipes() - n_pumps()].from;
        }
    }
    int link_to(int l) const
    {
        switch (link_kind(l)) {
            case LinkKind::Pipe: return pipes[l].to;
            case LinkKind::Pump: return pumps[l - n_pipes()].to;
            default: return valves[l - n_pipes() - n_pumps()].to;
        }
    }
    const std::string& link_id(int l) const
    {
        switch (link_kind(l)) {
            case LinkKind::Pipe: return pipes[l].id;
            case LinkKind::Pump: return pumps[l - n_pipes()].id;
            default: return valves[l - n_pipes() - n_pumps()].id;
        }
    }

    std::optional<int> find_node(const std::string& id) const
    {
        auto it = node_index_.find(id);
        if (it == node_index_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<int> find_link(const std::string& id) const
    {
        auto it = link_index_.find(id);
        if (it == link_index_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<int> find_booster(const std::string& id) const
    {
        for (size_t i = 0; i < boosters.size(); ++i)
            if (boosters[i].id == id) return static_cast<int>(i);
        return std::nullopt;
    }

    void rebuild_index()
    {
        node_index_.clear();
        link_index_.clear();
        for (int n = 0; n < n_nodes(); ++n) {
            if (!node_index_.emplace(node_id(n), n).second)
                throw ValidationError("duplicate node id '" + node_id(n) + "'");
        }
        for (int l = 0; l < n_links(); ++l) {
            if (!link_index_.emplace(link_id(l), l).second)
                throw ValidationError("duplicate link id '" + link_id(l) + "'");
        }
    }

    void validate() const
    {
        for (const auto& p : pipes) {
            if (p.from < 0 || p.from >= n_nodes() || p.to < 0 || p.to >= n_nodes())
                throw ValidationError("pipe '" + p.id + "' references a missing node");
            if (!(p.length > 0)) throw ValidationError("pipe '" + p.id + "' length must be > 0");
            if (!(p.diameter > 0)) throw ValidationError("pipe '" + p.id + "' diameter must be > 0");
            if (!(p.dm > 0)) throw ValidationError("pipe '" + p.id + "' molecular diffusion must be > 0");
            if (p.kb < 0 || p.kw < 0 || p.kf < 0)
                throw ValidationError("pipe '" + p.id + "' reaction rates must be nonnegative");
        }
        auto check_link = [&](const LinkSpec& l, const char* what) {
            if (l.from < 0 || l.from >= n_nodes() || l.to < 0 || l.to >= n_nodes())
                throw ValidationError(std::string(what) + " '" + l.id + "' references a missing node");
        };
        for (const auto& m : pumps) check_link(m, "pump");
        for (const auto& v : valves) check_link(v, "valve");
        for (const auto& t : tanks) {
            if (!(t.vmin > 0 && t.vmin <= t.v0 && t.v0 <= t.vmax))
                throw ValidationError("tank '" + t.id + "' requires 0 < vmin <= v0 <= vmax");
            if (t.kb < 0) throw ValidationError("tank '" + t.id + "' bulk rate must be nonnegative");
        }
        for (const auto& b : boosters) {
            if (b.node < 0 || b.node >= n_nodes())
                throw ValidationError("booster '" + b.id + "' references a missing node");
            if (node_kind(b.node) == NodeKind::Reservoir)
                throw ValidationError("booster '" + b.id + "' must sit on a junction or tank");
            if (!(b.umax > 0)) throw ValidationError("booster '" + b.id + "' umax must be > 0");
        }
        for (const auto& r : reservoirs)
            for (double c : r.source)
                if (c < 0) throw ValidationError("reservoir '" + r.id + "' source concentration must be nonnegative");
        if (n_nodes() > 0 && !connected())
            throw ValidationError("network graph is not connected");
    }

    bool connected() const
    {
        std::vector<std::vector<int>> adj(n_nodes());
        for (int l = 0; l < n_links(); ++l) {
            adj[link_from(l)].push_back(link_to(l));
            adj[link_to(l)].push_back(link_from(l));
        }
        std::vector<char> seen(n_nodes(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 0;
        while (!stack.empty()) {
            int n = stack.back();
            stack.pop_back();
            ++count;
            for (int m : adj[n])
                if (!seen[m]) {
                    seen[m] = 1;
                    stack.push_back(m);
                }
        }
        return count == n_nodes();
    }

private:
    std::map<std::string, int> node_index_;
    std::map<std::string, int> link_index_;
};

namespace detail {

inline std::map<std::string, std::string> record_fields(const std::vector<std::string>& toks,
                                                        const std::string& where)
{
    std::map<std::string, std::string> kv;
    for (size_t i = 1; i < toks.size(); ++i) {
        auto [k, v] = text::parse_kv(toks[i], where);
        if (!kv.emplace(k, v).second) throw ParseError("duplicate field '" + k + "' at " + where);
    }
    return kv;
}

inline double field_num(const std::map<std::string, std::string>& kv, const std::string& key,
                        const std::string& where, std::optional<double> fallback = std::nullopt)
{
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (fallback) return *fallback;
        throw ParseError("missing field '" + key + "' at " + where);
    }
    return text::parse_double(it->second, where);
}

}  // namespace detail

// Loads the record-per-line network file. Sections: [junctions],
// [reservoirs], [tanks], [pipes], [pumps], [valves], [boosters]. Each
// record is an id followed by named key=value fields.
inline NetworkTopology load_network(const std::string& path)
{
    TextFile f(path);
    NetworkTopology topo;
    std::string section;
    struct PendingLink {
        std::string id, from, to;
        std::map<std::string, std::string> kv;
        std::string where;
        LinkKind kind;
    };
    std::vector<PendingLink> links;
    struct PendingBooster {
        std::string id, node, species;
        double umax;
        std::string where;
    };
    std::vector<PendingBooster> boosters;

    for (size_t i = 0; i < f.size(); ++i) {
        const std::string& line = f.line(i);
        const std::string where = f.where(i);
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("malformed section header at " + where);
            section = line.substr(1, line.size() - 2);
            continue;
        }
        auto toks = text::split_ws(line);
        const std::string& id = toks[0];
        auto kv = detail::record_fields(toks, where);
        auto need = [&](const char* key) -> std::string {
            auto it = kv.find(key);
            if (it == kv.end()) throw ParseError("missing field '" + std::string(key) + "' at " + where);
            return it->second;
        };
        if (section == "junctions") {
            topo.junctions.push_back({id});
        } else if (section == "reservoirs") {
            ReservoirSpec r;
            r.id = id;
            r.source[0] = detail::field_num(kv, "cl", where, 0.0);
            r.source[1] = detail::field_num(kv, "fr", where, 0.0);
            r.source[2] = detail::field_num(kv, "thm", where, 0.0);
            topo.reservoirs.push_back(r);
        } else if (section == "tanks") {
            TankSpec t;
            t.id = id;
            t.vmin = detail::field_num(kv, "vmin", where);
            t.vmax = detail::field_num(kv, "vmax", where);
            t.v0 = detail::field_num(kv, "v0", where);
            t.kb = detail::field_num(kv, "kb", where, 0.0);
            topo.tanks.push_back(t);
        } else if (section == "pipes" || section == "pumps" || section == "valves") {
            PendingLink pl;
            pl.id = id;
            pl.from = need("from");
            pl.to = need("to");
            pl.kv = kv;
            pl.where = where;
            pl.kind = section == "pipes" ? LinkKind::Pipe
                                         : (section == "pumps" ? LinkKind::Pump : LinkKind::Valve);
            links.push_back(std::move(pl));
        } else if (section == "boosters") {
            PendingBooster b;
            b.id = id;
            b.node = need("node");
            b.umax = detail::field_num(kv, "umax", where);
            auto it = kv.find("species");
            b.species = it == kv.end() ? "chlorine" : it->second;
            b.where = where;
            boosters.push_back(std::move(b));
        } else {
            throw ParseError("record outside a known section at " + where);
        }
    }

    topo.rebuild_index();
    auto resolve = [&](const std::string& node_id, const std::string& owner,
                       const std::string& where) {
        auto n = topo.find_node(node_id);
        if (!n)
            throw ValidationError(owner + " references missing node '" + node_id + "' at " + where);
        return *n;
    };
    for (auto& pl : links) {
        if (pl.kind == LinkKind::Pipe) {
            PipeSpec p;
            p.id = pl.id;
            p.from = resolve(pl.from, "pipe '" + pl.id + "'", pl.where);
            p.to = resolve(pl.to, "pipe '" + pl.id + "'", pl.where);
            p.length = detail::field_num(pl.kv, "length", pl.where);
            p.diameter = detail::field_num(pl.kv, "diameter", pl.where);
            p.kb = detail::field_num(pl.kv, "kb", pl.where, 0.0);
            p.kw = detail::field_num(pl.kv, "kw", pl.where, 0.0);
            p.kf = detail::field_num(pl.kv, "kf", pl.where, 0.0);
            p.dm = detail::field_num(pl.kv, "dm", pl.where, 1.3e-9);
            topo.pipes.push_back(p);
        } else {
            LinkSpec l;
            l.id = pl.id;
            l.from = resolve(pl.from, "link '" + pl.id + "'", pl.where);
            l.to = resolve(pl.to, "link '" + pl.id + "'", pl.where);
            (pl.kind == LinkKind::Pump ? topo.pumps : topo.valves).push_back(l);
        }
    }
    for (auto& b : boosters) {
        BoosterSpec bs;
        bs.id = b.id;
        bs.node = resolve(b.node, "booster '" + b.id + "'", b.where);
        bs.umax = b.umax;
        if (b.species == "chlorine")
            bs.species = Species::Chlorine;
        else if (b.species == "reactant")
            bs.species = Species::Reactant;
        else
            throw ParseError("unknown booster species '" + b.species + "' at " + b.where);
        topo.boosters.push_back(bs);
    }

    topo.rebuild_index();
    topo.validate();
    return topo;
}

inline std::string serialize_network(const NetworkTopology& topo)
{
    using text::format_g;
    std::string out;
    out += "[junctions]\n";
    for (const auto& j : topo.junctions) out += j.id + "\n";
    out += "[reservoirs]\n";
    for (const auto& r : topo.reservoirs)
        out += r.id + " cl=" + format_g(r.source[0]) + " fr=" + format_g(r.source[1]) +
               " thm=" + format_g(r.source[2]) + "\n";
    out += "[tanks]\n";
    for (const auto& t : topo.tanks)
        out += t.id + " vmin=" + format_g(t.vmin) + " vmax=" + format_g(t.vmax) +
               " v0=" + format_g(t.v0) + " kb=" + format_g(t.kb) + "\n";
    out += "[pipes]\n";
    for (const auto& p : topo.pipes)
        out += p.id + " from=" + topo.node_id(p.from) + " to=" + topo.node_id(p.to) +
               " length=" + format_g(p.length) + " diameter=" + format_g(p.diameter) +
               " kb=" + format_g(p.kb) + " kw=" + format_g(p.kw) + " kf=" + format_g(p.kf) +
               " dm=" + format_g(p.dm) + "\n";
    out += "[pumps]\n";
    for (const auto& m : topo.pumps)
        out += m.id + " from=" + topo.node_id(m.from) + " to=" + topo.node_id(m.to) + "\n";
    out += "[valves]\n";
    for (const auto& v : topo.valves)
        out += v.id + " from=" + topo.node_id(v.from) + " to=" + topo.node_id(v.to) + "\n";
    out += "[boosters]\n";
    for (const auto& b : topo.boosters)
        out += b.id + " node=" + topo.node_id(b.node) + " umax=" + format_g(b.umax) +
               " species=" + species_name(b.species) + "\n";
    return out;
}

}  // namespace wqnet

#endif
