#include "wdn/network.hpp"

#include <set>

namespace wdn {

std::string to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Junction: return "junction";
        case NodeKind::TankOutlet: return "tank_outlet";
        case NodeKind::TankInlet: return "tank_inlet";
        case NodeKind::Reservoir: return "reservoir";
    }
    return "?";
}

std::string to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Pipe: return "pipe";
        case EdgeKind::Pump: return "pump";
        case EdgeKind::Valve: return "valve";
        case EdgeKind::Fictitious: return "fictitious";
    }
    return "?";
}

std::string Network::fict_id(const std::string& inlet, const std::string& outlet) {
    return "fict:" + inlet + "->" + outlet;
}

void Network::finalize() {
    node_idx_.clear();
    edge_idx_.clear();
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (!node_idx_.emplace(nodes[i].id, static_cast<int>(i)).second)
            throw InputError("duplicate node id '" + nodes[i].id + "'");
    }
    for (size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        if (!edge_idx_.emplace(e.id, static_cast<int>(i)).second)
            throw InputError("duplicate edge id '" + e.id + "'");
        if (!node_idx_.count(e.tail)) throw InputError("edge '" + e.id + "': unknown tail '" + e.tail + "'");
        if (!node_idx_.count(e.head)) throw InputError("edge '" + e.id + "': unknown head '" + e.head + "'");
        switch (e.kind) {
            case EdgeKind::Pipe:
                if (!(e.f_d > 0)) throw InputError("pipe '" + e.id + "': f_d must be > 0");
                break;
            case EdgeKind::Pump: {
                if (!e.pump) throw InputError("pump '" + e.id + "': missing pump parameters");
                const PumpParams& p = *e.pump;
                if (!(p.a < 0)) throw InputError("pump '" + e.id + "': a must be < 0");
                if (!(p.b > 0)) throw InputError("pump '" + e.id + "': b must be > 0");
                if (!(p.c > 0)) throw InputError("pump '" + e.id + "': c must be > 0");
                if (!(0 < p.w_min && p.w_min <= p.w_max))
                    throw InputError("pump '" + e.id + "': need 0 < w_min <= w_max");
                if (!(0 <= p.q_min && p.q_min <= p.q_max))
                    throw InputError("pump '" + e.id + "': need 0 <= q_min <= q_max");
                if (!(0 < p.eta && p.eta <= 1))
                    throw InputError("pump '" + e.id + "': need eta in (0,1]");
                break;
            }
            case EdgeKind::Valve:
                break;
            case EdgeKind::Fictitious:
                throw InputError("fictitious edges are declared via 'fictitious_edges', not 'edges'");
        }
    }
    if (!(rho > 0)) throw InputError("rho must be > 0");
    if (!(gravity > 0)) throw InputError("g must be > 0");
    if (!(slot_s > 0)) throw InputError("slot length must be > 0");
    if (!(big_m.m1_head > 0)) throw InputError("M1 must be > 0");
    if (!(big_m.m1_flow > 0)) throw InputError("m1 must be > 0");

    // Tanks: exactly one inlet, one outlet, one fictitious edge apiece.
    std::set<std::string> inlets_used, outlets_used;
    for (const auto& [in, out] : fictitious) {
        if (!node_idx_.count(in) || !node_idx_.count(out))
            throw InputError("fictitious edge references unknown node");
        if (node(in).kind != NodeKind::TankInlet)
            throw InputError("fictitious edge tail '" + in + "' is not a tank_inlet");
        if (node(out).kind != NodeKind::TankOutlet)
            throw InputError("fictitious edge head '" + out + "' is not a tank_outlet");
        if (!inlets_used.insert(in).second) throw InputError("tank inlet '" + in + "' used twice");
        if (!outlets_used.insert(out).second) throw InputError("tank outlet '" + out + "' used twice");
    }
    for (const Node& n : nodes) {
        if (n.kind == NodeKind::TankOutlet) {
            if (!n.tank) throw InputError("tank_outlet '" + n.id + "' missing tank parameters");
            if (!(n.tank->area_m2 > 0)) throw InputError("tank '" + n.id + "': area must be > 0");
            if (!(0 <= n.tank->initial_m3 && n.tank->initial_m3 <= n.tank->capacity_m3))
                throw InputError("tank '" + n.id + "': need 0 <= initial <= capacity");
            if (!outlets_used.count(n.id))
                throw InputError("tank_outlet '" + n.id + "' has no fictitious edge");
        }
        if (n.kind == NodeKind::TankInlet && !inlets_used.count(n.id))
            throw InputError("tank_inlet '" + n.id + "' has no fictitious edge");
        if (n.kind != NodeKind::TankOutlet && n.tank)
            throw InputError("node '" + n.id + "': tank parameters only allowed on tank_outlet");
    }

    // Physical edges may not enter a reservoir (infinite source, fixed head)
    // or a tank outlet (the outlet is fed through the fictitious edge only),
    // and may not leave a tank inlet. These shapes would break the head-shift
    // reconstruction, and no meaningful network needs them.
    for (const Edge& e : edges) {
        if (node(e.head).kind == NodeKind::Reservoir)
            throw InputError("edge '" + e.id + "' flows into a reservoir");
        if (node(e.head).kind == NodeKind::TankOutlet)
            throw InputError("edge '" + e.id + "' flows into a tank outlet; use its inlet");
        if (node(e.tail).kind == NodeKind::TankInlet)
            throw InputError("edge '" + e.id + "' leaves a tank inlet; use its outlet");
    }
}

int Network::node_index(const std::string& id) const {
    auto it = node_idx_.find(id);
    if (it == node_idx_.end()) throw InputError("unknown node id '" + id + "'");
    return it->second;
}

int Network::edge_index(const std::string& id) const {
    auto it = edge_idx_.find(id);
    if (it == edge_idx_.end()) throw InputError("unknown edge id '" + id + "'");
    return it->second;
}

std::vector<std::string> Network::tank_outlet_ids() const {
    std::vector<std::string> out;
    for (const Node& n : nodes)
        if (n.kind == NodeKind::TankOutlet) out.push_back(n.id);
    return out;
}

std::vector<std::string> Network::pump_ids() const {
    std::vector<std::string> out;
    for (const Edge& e : edges)
        if (e.kind == EdgeKind::Pump) out.push_back(e.id);
    return out;
}

}  // namespace wdn
