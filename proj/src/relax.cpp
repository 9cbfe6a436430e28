#include "wdn/relax.hpp"

#include <cmath>

namespace wdn {

DiscretizationGrid DiscretizationGrid::uniform(int b, double zeta_max, int c, double sigma_max) {
    if (b < 1 || c < 1) throw InputError("grids need at least one bin");
    if (!(zeta_max > 0) || !(sigma_max > 0)) throw InputError("grid endpoints must be > 0");
    DiscretizationGrid g;
    for (int i = 0; i <= b; ++i) g.zeta.push_back(zeta_max * i / b);
    for (int i = 0; i <= c; ++i) g.sigma.push_back(sigma_max * i / c);
    return g;
}

void DiscretizationGrid::validate() const {
    if (zeta.size() < 2 || sigma.size() < 2) throw InputError("grid needs at least one bin");
    for (size_t i = 1; i < zeta.size(); ++i)
        if (!(zeta[i] > zeta[i - 1])) throw InputError("pump grid must be strictly increasing");
    for (size_t i = 1; i < sigma.size(); ++i)
        if (!(sigma[i] > sigma[i - 1])) throw InputError("tank grid must be strictly increasing");
}

std::pair<double, double> fit_pump_lower_line(const PumpParams& p) {
    const double qs = 0.5 * (p.q_min + p.q_max);
    const double d = 2.0 * p.a * qs + p.b * p.w_min;
    const double e = -p.a * qs * qs + p.c * p.w_min * p.w_min;
    // band check: some flow in range must admit a head between the line and
    // the maximum-speed curve. Their gap is concave in q, so it suffices to
    // look at its maximizer. A single-speed pump degenerates to a band that
    // touches only at the tangency point, which still passes.
    auto gap = [&](double q) {
        return p.a * q * q + p.b * p.w_max * q + p.c * p.w_max * p.w_max - (d * q + e);
    };
    double qm = (p.b * p.w_max - d) / (-2.0 * p.a);
    qm = std::min(std::max(qm, p.q_min), p.q_max);
    const double best = std::max({gap(qm), gap(p.q_min), gap(p.q_max)});
    if (best < -1e-9)
        throw InputError("pump convexification band is empty (gap " + std::to_string(best) + ")");
    return {d, e};
}

namespace {

struct BaseVars {
    std::map<int, int> h;       // active node index -> var
    std::map<int, int> q;       // active edge index -> var
    std::map<int, int> gain;    // active edge index -> var (physical only)
    std::map<int, int> volume;  // active node index -> var (tank outlets)
};

// Variables and rows shared by every formulation: flow conservation, tank
// dynamics, head couplings, pump band. Darcy handling and the budget differ
// per formulation and are added by the callers.
BaseVars build_base(ConicProgram& p, const Network& net, const ActiveGraph& g,
                    const SlotInput& in, const BigMConstants& big_m, bool include_budget) {
    BaseVars bv;
    const double delta = net.slot_s;

    for (int i = 0; i < static_cast<int>(g.node_ids().size()); ++i) {
        const Node& n = g.node(i);
        double lb = 0.0, ub = kInf;
        switch (n.kind) {
            case NodeKind::Junction: lb = n.min_head_m; break;
            case NodeKind::TankInlet: lb = n.elevation_m; break;
            case NodeKind::TankOutlet:
                lb = 0.0;
                ub = n.tank->capacity_m3 / n.tank->area_m2;
                break;
            case NodeKind::Reservoir: lb = ub = 0.0; break;
        }
        bv.h[i] = p.add_var("H[" + n.id + "]", lb, ub, {"H", n.id});
        if (n.kind == NodeKind::TankOutlet)
            bv.volume[i] = p.add_var("V[" + n.id + "]", 0.0, n.tank->capacity_m3, {"V", n.id});
    }
    for (int a = 0; a < static_cast<int>(g.edges().size()); ++a) {
        const ActiveEdge& e = g.edges()[a];
        double lb = 0.0, ub = kInf;
        switch (e.kind) {
            case EdgeKind::Pump: {
                const PumpParams& pp = *net.edges[e.net_edge].pump;
                lb = pp.q_min;
                ub = pp.q_max;
                break;
            }
            case EdgeKind::Valve:
            case EdgeKind::Pipe:
                lb = big_m.m1_flow;
                ub = big_m.m1_head;
                break;
            case EdgeKind::Fictitious:
                lb = 0.0;
                break;
        }
        bv.q[a] = p.add_var("Q[" + e.id + "]", lb, ub, {"Q", e.id});
        if (e.kind != EdgeKind::Fictitious)
            bv.gain[a] = p.add_var("G[" + e.id + "]", 0.0, kInf, {"G", e.id});
    }

    for (int i = 0; i < static_cast<int>(g.node_ids().size()); ++i) {
        const Node& n = g.node(i);
        if (n.kind == NodeKind::Junction || n.kind == NodeKind::TankInlet) {
            LinRow r;
            r.name = "flow_conservation[" + n.id + "]";
            r.family = "flow_conservation";
            r.lo = r.hi = n.kind == NodeKind::Junction ? in.demand(n.id) : 0.0;
            for (int a : g.in_edges(i)) r.terms.emplace_back(bv.q[a], 1.0);
            for (int a : g.out_edges(i)) r.terms.emplace_back(bv.q[a], -1.0);
            p.rows.push_back(std::move(r));
        } else if (n.kind == NodeKind::TankOutlet) {
            const TankParams& t = *n.tank;
            auto vprev = in.prev_volume_m3.find(n.id);
            auto hprev = in.prev_head_m.find(n.id);
            if (vprev == in.prev_volume_m3.end() || hprev == in.prev_head_m.end())
                throw InputError("slot input is missing previous state for tank '" + n.id + "'");
            LinRow vol;
            vol.name = "tank_volume_balance[" + n.id + "]";
            vol.family = "tank_volume_balance";
            vol.lo = vol.hi = vprev->second;
            vol.terms.emplace_back(bv.volume[i], 1.0);
            for (int a : g.in_edges(i)) vol.terms.emplace_back(bv.q[a], -delta);
            for (int a : g.out_edges(i)) vol.terms.emplace_back(bv.q[a], delta);
            p.rows.push_back(std::move(vol));
            LinRow hd;
            hd.name = "tank_head_dynamics[" + n.id + "]";
            hd.family = "tank_head_dynamics";
            hd.lo = hd.hi = hprev->second;
            hd.terms.emplace_back(bv.h[i], 1.0);
            for (int a : g.in_edges(i)) hd.terms.emplace_back(bv.q[a], -delta / t.area_m2);
            for (int a : g.out_edges(i)) hd.terms.emplace_back(bv.q[a], delta / t.area_m2);
            p.rows.push_back(std::move(hd));
        }
    }

    for (int a = 0; a < static_cast<int>(g.edges().size()); ++a) {
        const ActiveEdge& e = g.edges()[a];
        if (e.kind == EdgeKind::Fictitious) continue;
        const Node& tail = g.node(e.tail);
        const Node& head = g.node(e.head);
        const double rhs = tail.elevation_m - head.elevation_m;
        LinRow r;
        r.terms.emplace_back(bv.h[e.head], 1.0);
        r.terms.emplace_back(bv.h[e.tail], -1.0);
        if (e.kind == EdgeKind::Pump) {
            // total head rises across an on pump by exactly the gain
            r.name = "pump_coupling[" + e.id + "]";
            r.family = "pump_coupling";
            r.terms.emplace_back(bv.gain[a], -1.0);
        } else {
            r.name = (e.kind == EdgeKind::Valve ? "valve_coupling[" : "pipe_coupling[") + e.id + "]";
            r.family = e.kind == EdgeKind::Valve ? "valve_coupling" : "pipe_coupling";
            r.terms.emplace_back(bv.gain[a], 1.0);
        }
        r.lo = r.hi = rhs;
        p.rows.push_back(std::move(r));

        if (e.kind == EdgeKind::Pump) {
            const PumpParams& pp = *net.edges[e.net_edge].pump;
            QuadRow up;
            up.name = "pump_curve_upper[" + e.id + "]";
            up.family = "pump_curve_upper";
            up.sq.emplace_back(bv.q[a], -pp.a);  // a < 0, so the row is convex
            up.lin.emplace_back(bv.gain[a], 1.0);
            up.lin.emplace_back(bv.q[a], -pp.b * pp.w_max);
            up.hi = pp.c * pp.w_max * pp.w_max;
            p.quad_rows.push_back(std::move(up));
            auto [d, eL] = fit_pump_lower_line(pp);
            LinRow lo;
            lo.name = "pump_curve_lower[" + e.id + "]";
            lo.family = "pump_curve_lower";
            lo.lo = eL;
            lo.terms.emplace_back(bv.gain[a], 1.0);
            lo.terms.emplace_back(bv.q[a], -d);
            p.rows.push_back(std::move(lo));
        }
    }

    if (include_budget) {
        BilinearRow b;
        b.name = "energy_budget";
        // scaled by 1/(rho g delta): sum (1/eta) G Q <= r / (rho g)
        for (int a = 0; a < static_cast<int>(g.edges().size()); ++a) {
            const ActiveEdge& e = g.edges()[a];
            if (e.kind != EdgeKind::Pump) continue;
            b.terms.emplace_back(bv.gain[a], bv.q[a], 1.0 / net.edges[e.net_edge].pump->eta);
        }
        b.hi = in.r_watt / (net.rho * net.gravity);
        p.bilinear.push_back(std::move(b));
    }
    return bv;
}

void set_harvest_quad_objective(ConicProgram& p, const ActiveGraph& g) {
    p.obj.sense = Sense::Maximize;
    p.obj.quad.clear();
    for (int i = 0; i < static_cast<int>(g.node_ids().size()); ++i) {
        const Node& n = g.node(i);
        if (n.kind != NodeKind::TankOutlet) continue;
        p.obj.quad.emplace_back(p.find_var("H", n.id), n.tank->area_m2);
    }
}

}  // namespace

ConicProgram build_N2(const Network& net, const ActiveGraph& g, const SlotInput& in,
                      const BigMConstants& big_m) {
    ConicProgram p;
    p.name = "N2";
    BaseVars bv = build_base(p, net, g, in, big_m, true);
    for (int a = 0; a < static_cast<int>(g.edges().size()); ++a) {
        const ActiveEdge& e = g.edges()[a];
        if (e.kind != EdgeKind::Pipe) continue;
        p.quad_eqs.push_back({"darcy_loss[" + e.id + "]", bv.gain[a], bv.q[a],
                              net.edges[e.net_edge].f_d});
    }
    set_harvest_quad_objective(p, g);
    return p;
}

ConicProgram build_N3(const Network& net, const ActiveGraph& g, const SlotInput& in,
                      const BigMConstants& big_m) {
    ConicProgram p;
    p.name = "N3";
    BaseVars bv = build_base(p, net, g, in, big_m, true);
    for (int a = 0; a < static_cast<int>(g.edges().size()); ++a) {
        const ActiveEdge& e = g.edges()[a];
        if (e.kind != EdgeKind::Pipe) continue;
        int w = p.add_var("W[" + e.id + "]", 0.0, kInf, {"W", e.id});
        LinRow r;
        r.name = "darcy_loss_relaxed[" + e.id + "]";
        r.family = "darcy_loss_relaxed";
        r.lo = r.hi = 0.0;
        r.terms.emplace_back(bv.gain[a], 1.0);
        r.terms.emplace_back(w, -net.edges[e.net_edge].f_d);
        p.rows.push_back(std::move(r));
        QuadRow cone;
        cone.name = "flow_square_cone[" + e.id + "]";
        cone.family = "flow_square_cone";
        cone.sq.emplace_back(bv.q[a], 1.0);
        cone.lin.emplace_back(w, -1.0);
        cone.hi = 0.0;
        p.quad_rows.push_back(std::move(cone));
        p.cones.push_back({"flow_square_cone[" + e.id + "]", w, {bv.q[a]}});
    }
    set_harvest_quad_objective(p, g);
    return p;
}

void discretize_pump_heads(ConicProgram& p, const ActiveGraph& g, const DiscretizationGrid& grid,
                           const BigMConstants& big_m, std::vector<std::string>* warnings) {
    grid.validate();
    const int nb = grid.bins_pump();
    for (const ActiveEdge& e : g.edges()) {
        if (e.kind != EdgeKind::Pump) continue;
        int gv = p.find_var("G", e.id);
        if (gv < 0) throw InputError("pump head variable missing for '" + e.id + "'");
        const PumpParams& pp = *g.network().edges[e.net_edge].pump;
        const double shutoff = pp.c * pp.w_max * pp.w_max;
        if (warnings && grid.zeta.back() < shutoff)
            warnings->push_back("pump " + e.id + ": grid max " + std::to_string(grid.zeta.back()) +
                                " m is below the shutoff head " + std::to_string(shutoff) +
                                " m; the head range is truncated and may be infeasible");
        OneHotGroup group;
        group.name = "pump_head_one_hot[" + e.id + "]";
        LinRow decode;
        decode.name = "pump_head_decode[" + e.id + "]";
        decode.family = "pump_head_decode";
        decode.lo = decode.hi = 0.0;
        decode.terms.emplace_back(gv, 1.0);
        LinRow onehot;
        onehot.name = group.name;
        onehot.family = "pump_head_one_hot";
        onehot.lo = onehot.hi = 1.0;  // pump is on in the active graph
        for (int b = 1; b <= nb; ++b) {
            int z = p.add_var("z[" + e.id + "," + std::to_string(b) + "]", 0.0, 1.0,
                              {"z", e.id, b}, true);
            group.vars.push_back(z);
            decode.terms.emplace_back(z, -grid.zeta[b]);
            onehot.terms.emplace_back(z, 1.0);
            LinRow lo;
            lo.name = "pump_head_bin_lo[" + e.id + "," + std::to_string(b) + "]";
            lo.family = "pump_head_bin_lo";
            lo.hi = 0.0;
            lo.terms.emplace_back(z, grid.zeta[b - 1]);
            lo.terms.emplace_back(gv, -1.0);
            p.rows.push_back(std::move(lo));
            LinRow hi;
            hi.name = "pump_head_bin_hi[" + e.id + "," + std::to_string(b) + "]";
            hi.family = "pump_head_bin_hi";
            hi.hi = big_m.m1_head;
            hi.terms.emplace_back(gv, 1.0);
            hi.terms.emplace_back(z, big_m.m1_head - grid.zeta[b]);
            p.rows.push_back(std::move(hi));
        }
        p.rows.push_back(std::move(decode));
        p.rows.push_back(std::move(onehot));
        p.one_hot.push_back(std::move(group));
    }
}

void glover_linearize(ConicProgram& p, const ActiveGraph& g, const std::string& pump_id,
                      const DiscretizationGrid& grid) {
    const ActiveEdge* edge = nullptr;
    for (const ActiveEdge& e : g.edges())
        if (e.id == pump_id && e.kind == EdgeKind::Pump) edge = &e;
    if (!edge) throw InputError("glover_linearize: '" + pump_id + "' is not an active pump");
    const PumpParams& pp = *g.network().edges[edge->net_edge].pump;
    int qv = p.find_var("Q", pump_id);
    const int nb = grid.bins_pump();
    // disaggregation: sum_b Phi_b = Q (exact whenever the z group is one-hot,
    // and satisfied by the fractional lift Phi = Q z); keeps the relaxation
    // from dropping the energy terms to zero while z is still spread out
    LinRow sum;
    sum.name = "glover_sum[" + pump_id + "]";
    sum.family = "glover_sum";
    sum.lo = sum.hi = 0.0;
    sum.terms.emplace_back(qv, -1.0);
    for (int b = 1; b <= nb; ++b) {
        int z = p.find_var("z", pump_id, b);
        if (z < 0) throw InputError("glover_linearize needs discretize_pump_heads first");
        int phi = p.add_var("Phi[" + pump_id + "," + std::to_string(b) + "]",
                            std::min(0.0, pp.q_min), pp.q_max, {"Phi", pump_id, b});
        sum.terms.emplace_back(phi, 1.0);
        const std::string tag = "[" + pump_id + "," + std::to_string(b) + "]";
        LinRow lb;
        lb.name = "glover_lb" + tag;
        lb.family = "glover_lb";
        lb.hi = 0.0;
        lb.terms.emplace_back(z, pp.q_min);
        lb.terms.emplace_back(phi, -1.0);
        p.rows.push_back(std::move(lb));
        LinRow ub;
        ub.name = "glover_ub" + tag;
        ub.family = "glover_ub";
        ub.hi = 0.0;
        ub.terms.emplace_back(phi, 1.0);
        ub.terms.emplace_back(z, -pp.q_max);
        p.rows.push_back(std::move(ub));
        LinRow flo;
        flo.name = "glover_flow_lo" + tag;
        flo.family = "glover_flow_lo";
        flo.hi = pp.q_max;
        flo.terms.emplace_back(qv, 1.0);
        flo.terms.emplace_back(z, pp.q_max);
        flo.terms.emplace_back(phi, -1.0);
        p.rows.push_back(std::move(flo));
        LinRow fhi;
        fhi.name = "glover_flow_hi" + tag;
        fhi.family = "glover_flow_hi";
        fhi.hi = -pp.q_min;
        fhi.terms.emplace_back(phi, 1.0);
        fhi.terms.emplace_back(qv, -1.0);
        fhi.terms.emplace_back(z, -pp.q_min);
        p.rows.push_back(std::move(fhi));
    }
    p.rows.push_back(std::move(sum));
}

void discretize_tank_heads(ConicProgram& p, const ActiveGraph& g, const SlotInput& in,
                           const DiscretizationGrid& grid, const BigMConstants& big_m,
                           std::vector<std::string>* warnings) {
    grid.validate();
    const int nc = grid.bins_tank();
    p.obj.sense = Sense::Maximize;
    p.obj.quad.clear();
    p.obj.linear.clear();
    for (int i = 0; i < static_cast<int>(g.node_ids().size()); ++i) {
        const Node& n = g.node(i);
        if (n.kind != NodeKind::TankOutlet) continue;
        int hv = p.find_var("H", n.id);
        if (hv < 0) throw InputError("tank head variable missing for '" + n.id + "'");
        auto hprev = in.prev_head_m.find(n.id);
        if (warnings && hprev != in.prev_head_m.end() && grid.sigma.back() < hprev->second)
            warnings->push_back("tank " + n.id + ": current head " + std::to_string(hprev->second) +
                                " m is above the grid max " + std::to_string(grid.sigma.back()) +
                                " m; the slot is likely infeasible");
        OneHotGroup group;
        group.name = "tank_head_one_hot[" + n.id + "]";
        LinRow decode;
        decode.name = "tank_head_decode[" + n.id + "]";
        decode.family = "tank_head_decode";
        decode.lo = decode.hi = 0.0;
        decode.terms.emplace_back(hv, 1.0);
        LinRow onehot;
        onehot.name = group.name;
        onehot.family = "tank_head_one_hot";
        onehot.lo = onehot.hi = 1.0;
        for (int c = 1; c <= nc; ++c) {
            int s = p.add_var("s[" + n.id + "," + std::to_string(c) + "]", 0.0, 1.0,
                              {"s", n.id, c}, true);
            group.vars.push_back(s);
            decode.terms.emplace_back(s, -grid.sigma[c]);
            onehot.terms.emplace_back(s, 1.0);
            p.obj.linear.emplace_back(s, n.tank->area_m2 * grid.sigma[c] * grid.sigma[c]);
            LinRow lo;
            lo.name = "tank_head_bin_lo[" + n.id + "," + std::to_string(c) + "]";
            lo.family = "tank_head_bin_lo";
            lo.hi = 0.0;
            lo.terms.emplace_back(s, grid.sigma[c - 1]);
            lo.terms.emplace_back(hv, -1.0);
            p.rows.push_back(std::move(lo));
            LinRow hi;
            hi.name = "tank_head_bin_hi[" + n.id + "," + std::to_string(c) + "]";
            hi.family = "tank_head_bin_hi";
            hi.hi = big_m.m1_head;
            hi.terms.emplace_back(hv, 1.0);
            hi.terms.emplace_back(s, big_m.m1_head - grid.sigma[c]);
            p.rows.push_back(std::move(hi));
        }
        p.rows.push_back(std::move(decode));
        p.rows.push_back(std::move(onehot));
        p.one_hot.push_back(std::move(group));
    }
}

namespace {

ConicProgram build_discretized(const Network& net, const ActiveGraph& g, const SlotInput& in,
                               const DiscretizationGrid& grid, const BigMConstants& big_m,
                               bool with_budget, std::vector<std::string>* warnings) {
    ConicProgram p = build_N3(net, g, in, big_m);
    p.bilinear.clear();  // replaced by the linearized budget
    discretize_pump_heads(p, g, grid, big_m, warnings);
    for (const ActiveEdge& e : g.edges())
        if (e.kind == EdgeKind::Pump) glover_linearize(p, g, e.id, grid);
    discretize_tank_heads(p, g, in, grid, big_m, warnings);
    if (with_budget) {
        LinRow budget;
        budget.name = "energy_budget";
        budget.family = "energy_budget";
        budget.hi = in.r_watt / (net.rho * net.gravity);
        for (const ActiveEdge& e : g.edges()) {
            if (e.kind != EdgeKind::Pump) continue;
            const double inv_eta = 1.0 / net.edges[e.net_edge].pump->eta;
            for (int b = 1; b <= grid.bins_pump(); ++b)
                budget.terms.emplace_back(p.find_var("Phi", e.id, b), inv_eta * grid.zeta[b]);
        }
        p.rows.push_back(std::move(budget));
    }
    return p;
}

}  // namespace

ConicProgram build_N4(const Network& net, const ActiveGraph& g, const SlotInput& in,
                      const DiscretizationGrid& grid, const BigMConstants& big_m,
                      std::vector<std::string>* warnings) {
    ConicProgram p = build_discretized(net, g, in, grid, big_m, true, warnings);
    p.name = "N4";
    return p;
}

ConicProgram build_M1_relaxed(const Network& net, const ActiveGraph& g, const SlotInput& in,
                              const DiscretizationGrid& grid, const BigMConstants& big_m,
                              std::vector<std::string>* warnings) {
    ConicProgram p = build_discretized(net, g, in, grid, big_m, false, warnings);
    p.name = "M1";
    p.obj.sense = Sense::Minimize;
    p.obj.linear.clear();
    p.obj.quad.clear();
    for (const ActiveEdge& e : g.edges()) {
        if (e.kind != EdgeKind::Pump) continue;
        const double inv_eta = 1.0 / net.edges[e.net_edge].pump->eta;
        for (int b = 1; b <= grid.bins_pump(); ++b)
            p.obj.linear.emplace_back(p.find_var("Phi", e.id, b), inv_eta * grid.zeta[b]);
    }
    return p;
}

RelaxedSolution decode_solution(const ConicProgram& p, const ActiveGraph& g,
                                const std::vector<double>& x) {
    RelaxedSolution sol;
    auto bin_vec = [&](std::map<std::string, std::vector<double>>& dst, const Provenance& prov,
                       double v) {
        auto& vec = dst[prov.element];
        if (static_cast<int>(vec.size()) < prov.bin) vec.resize(prov.bin, 0.0);
        vec[prov.bin - 1] = v;
    };
    for (size_t j = 0; j < p.vars.size(); ++j) {
        const Provenance& prov = p.vars[j].prov;
        const double v = x[j];
        if (prov.symbol == "H") sol.schedule.head_m[prov.element] = v;
        else if (prov.symbol == "Q") sol.schedule.flow_m3s[prov.element] = v;
        else if (prov.symbol == "G") sol.schedule.gain_m[prov.element] = v;
        else if (prov.symbol == "V") sol.schedule.volume_m3[prov.element] = v;
        else if (prov.symbol == "W") sol.w[prov.element] = v;
        else if (prov.symbol == "z") bin_vec(sol.z, prov, v);
        else if (prov.symbol == "s") bin_vec(sol.s, prov, v);
        else if (prov.symbol == "Phi") bin_vec(sol.phi, prov, v);
    }
    (void)g;
    sol.objective = p.objective_value(x);
    return sol;
}

std::vector<double> embed_solution(const ConicProgram& p, const RelaxedSolution& sol) {
    std::vector<double> x(p.vars.size(), 0.0);
    auto from_vec = [&](const std::map<std::string, std::vector<double>>& src,
                        const Provenance& prov) -> double {
        auto it = src.find(prov.element);
        if (it == src.end() || static_cast<int>(it->second.size()) < prov.bin)
            throw InputError("embed: missing " + prov.symbol + " for '" + prov.element + "'");
        return it->second[prov.bin - 1];
    };
    auto from_map = [&](const std::map<std::string, double>& src, const Provenance& prov) {
        auto it = src.find(prov.element);
        if (it == src.end())
            throw InputError("embed: missing " + prov.symbol + " for '" + prov.element + "'");
        return it->second;
    };
    for (size_t j = 0; j < p.vars.size(); ++j) {
        const Provenance& prov = p.vars[j].prov;
        if (prov.symbol == "H") x[j] = from_map(sol.schedule.head_m, prov);
        else if (prov.symbol == "Q") x[j] = from_map(sol.schedule.flow_m3s, prov);
        else if (prov.symbol == "G") x[j] = from_map(sol.schedule.gain_m, prov);
        else if (prov.symbol == "V") x[j] = from_map(sol.schedule.volume_m3, prov);
        else if (prov.symbol == "W") x[j] = from_map(sol.w, prov);
        else if (prov.symbol == "z") x[j] = from_vec(sol.z, prov);
        else if (prov.symbol == "s") x[j] = from_vec(sol.s, prov);
        else if (prov.symbol == "Phi") x[j] = from_vec(sol.phi, prov);
        else throw InputError("embed: unknown symbol '" + prov.symbol + "'");
    }
    return x;
}

}  // namespace wdn
