#include "wdn/hydraulics.hpp"

#include <cmath>

namespace wdn {

double pump_head_gain(double q, double w, const PumpParams& p) {
    return p.a * q * q + p.b * q * w + p.c * w * w;
}

double darcy_head_loss(double q, double f_d) { return f_d * q * q; }

double pump_energy(double gain_m, double q, double eta, double rho, double g, double delta_s) {
    return rho * g * delta_s / eta * gain_m * q;
}

namespace {

double lookup(const std::map<std::string, double>& m, const std::string& id,
              const char* what) {
    auto it = m.find(id);
    if (it == m.end())
        throw InputError(std::string("schedule is missing ") + what + " for '" + id + "'");
    return it->second;
}

}  // namespace

std::vector<Violation> check_schedule(const Network& net, const ActiveGraph& g,
                                      const SlotInput& in, const Schedule& s, double tol) {
    std::vector<Violation> out;
    auto add = [&](const std::string& fam, const std::string& el, double res) {
        if (std::fabs(res) > tol) out.push_back({fam, el, res});
    };
    auto total = [&](int node_idx) {
        const Node& n = g.node(node_idx);
        return lookup(s.head_m, n.id, "head") + n.elevation_m;
    };

    const double delta = net.slot_s;

    for (int i = 0; i < static_cast<int>(g.node_ids().size()); ++i) {
        const Node& n = g.node(i);
        double inflow = 0.0, outflow = 0.0;
        for (int a : g.in_edges(i)) inflow += lookup(s.flow_m3s, g.edges()[a].id, "flow");
        for (int a : g.out_edges(i)) outflow += lookup(s.flow_m3s, g.edges()[a].id, "flow");
        const double head = lookup(s.head_m, n.id, "head");

        switch (n.kind) {
            case NodeKind::Junction:
                add("flow_conservation", n.id, inflow - outflow - in.demand(n.id));
                if (head < n.min_head_m - tol)
                    out.push_back({"min_head", n.id, head - n.min_head_m});
                break;
            case NodeKind::TankInlet:
                // fictitious edges carry the inlet flow straight through
                add("flow_conservation", n.id, inflow - outflow);
                if (head < n.elevation_m - tol)
                    out.push_back({"tank_inlet_head", n.id, head - n.elevation_m});
                break;
            case NodeKind::TankOutlet: {
                const TankParams& t = *n.tank;
                const double v = lookup(s.volume_m3, n.id, "volume");
                const double v_prev = lookup(in.prev_volume_m3, n.id, "previous volume");
                const double h_prev = lookup(in.prev_head_m, n.id, "previous head");
                add("tank_volume_balance", n.id, v - v_prev - delta * (inflow - outflow));
                add("tank_head_dynamics", n.id,
                    head - h_prev - delta / t.area_m2 * (inflow - outflow));
                if (v < -tol) out.push_back({"tank_volume_bounds", n.id, v});
                if (v > t.capacity_m3 + tol)
                    out.push_back({"tank_volume_bounds", n.id, v - t.capacity_m3});
                break;
            }
            case NodeKind::Reservoir:
                // pressure head on the surface is zero; total head = elevation
                add("reservoir_head", n.id, head);
                break;
        }
    }

    for (const ActiveEdge& e : g.edges()) {
        const double q = lookup(s.flow_m3s, e.id, "flow");
        if (e.kind == EdgeKind::Fictitious) {
            if (q < -tol) out.push_back({"fictitious_flow_sign", e.id, q});
            continue;
        }
        const Edge& ne = net.edges[e.net_edge];
        const double gain = lookup(s.gain_m, e.id, "gain");
        const double coupling = total(e.head) - total(e.tail);
        switch (e.kind) {
            case EdgeKind::Pump: {
                const PumpParams& p = *ne.pump;
                if (q < p.q_min - tol) out.push_back({"pump_flow_bounds", e.id, q - p.q_min});
                if (q > p.q_max + tol) out.push_back({"pump_flow_bounds", e.id, q - p.q_max});
                add("pump_coupling", e.id, coupling - gain);
                auto it = s.speed.find(e.id);
                if (it == s.speed.end()) {
                    out.push_back({"pump_speed_missing", e.id, 0.0});
                } else {
                    const double w = it->second;
                    if (w < p.w_min - tol || w > p.w_max + tol)
                        out.push_back({"pump_speed_bounds", e.id,
                                       w < p.w_min ? w - p.w_min : w - p.w_max});
                    add("pump_curve", e.id, gain - pump_head_gain(q, w, p));
                }
                break;
            }
            case EdgeKind::Valve:
                if (gain < -tol) out.push_back({"valve_loss_sign", e.id, gain});
                if (q < net.big_m.m1_flow - tol)
                    out.push_back({"valve_flow_bounds", e.id, q - net.big_m.m1_flow});
                if (q > net.big_m.m1_head + tol)
                    out.push_back({"valve_flow_bounds", e.id, q - net.big_m.m1_head});
                add("valve_coupling", e.id, coupling + gain);
                break;
            case EdgeKind::Pipe:
                if (gain < -tol) out.push_back({"pipe_loss_sign", e.id, gain});
                if (q < net.big_m.m1_flow - tol)
                    out.push_back({"pipe_flow_bounds", e.id, q - net.big_m.m1_flow});
                if (q > net.big_m.m1_head + tol)
                    out.push_back({"pipe_flow_bounds", e.id, q - net.big_m.m1_head});
                add("pipe_coupling", e.id, coupling + gain);
                add("darcy_loss", e.id, gain - darcy_head_loss(q, ne.f_d));
                break;
            case EdgeKind::Fictitious:
                break;
        }
    }
    return out;
}

AuditReport energy_audit(const Network& net, const ActiveGraph& g, const SlotInput& in,
                         const Schedule& s) {
    AuditReport rep;
    const double rho_g = net.rho * net.gravity;
    const double coef = rho_g * net.slot_s;
    auto total = [&](int node_idx) {
        const Node& n = g.node(node_idx);
        return lookup(s.head_m, n.id, "head") + n.elevation_m;
    };

    for (const ActiveEdge& e : g.edges()) {
        const double q = lookup(s.flow_m3s, e.id, "flow");
        if (e.kind == EdgeKind::Pump) {
            const double gain = lookup(s.gain_m, e.id, "gain");
            const double ej = coef * gain * q;
            rep.pumps_j += ej;
            rep.pumps_electrical_j += ej / net.edges[e.net_edge].pump->eta;
            rep.per_element_j[e.id] = ej;
        } else {
            const double loss = coef * q * (total(e.tail) - total(e.head));
            rep.losses_j += loss;
            rep.per_element_j[e.id] = loss;
        }
    }
    for (int i = 0; i < static_cast<int>(g.node_ids().size()); ++i) {
        const Node& n = g.node(i);
        switch (n.kind) {
            case NodeKind::Reservoir: {
                double outflow = 0.0;
                for (int a : g.out_edges(i)) outflow += lookup(s.flow_m3s, g.edges()[a].id, "flow");
                rep.reservoirs_j += coef * outflow * n.elevation_m;
                break;
            }
            case NodeKind::Junction:
                rep.demand_j += coef * in.demand(n.id) * total(i);
                break;
            case NodeKind::TankOutlet: {
                const double h = lookup(s.head_m, n.id, "head");
                const double h_prev = lookup(in.prev_head_m, n.id, "previous head");
                rep.tanks_j += rho_g * n.tank->area_m2 * (h + n.elevation_m) * (h - h_prev);
                break;
            }
            case NodeKind::TankInlet:
                break;
        }
    }
    rep.imbalance_j = rep.pumps_j + rep.reservoirs_j - rep.tanks_j - rep.losses_j - rep.demand_j;
    return rep;
}

}  // namespace wdn
