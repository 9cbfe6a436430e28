#include "wdn/recon.hpp"

#include <cmath>

#include "wdn/hydraulics.hpp"

namespace wdn {

ExactnessReport exactness_report(const RelaxedSolution& sol, const Network& net,
                                 const ActiveGraph& g, double tol) {
    ExactnessReport rep;
    for (const ActiveEdge& e : g.edges()) {
        if (e.kind != EdgeKind::Pipe) continue;
        auto wit = sol.w.find(e.id);
        auto qit = sol.schedule.flow_m3s.find(e.id);
        if (wit == sol.w.end() || qit == sol.schedule.flow_m3s.end())
            throw InputError("solution is missing W or Q for pipe '" + e.id + "'");
        const double f_d = net.edges[e.net_edge].f_d;
        const double eps = f_d * (wit->second - qit->second * qit->second);
        if (eps < -kFeasTol)
            throw InputError("pipe '" + e.id + "': W below Q^2 (cone violated, eps=" +
                             std::to_string(eps) + ")");
        rep.eps_m[e.id] = eps;
        rep.max_eps = std::max(rep.max_eps, eps);
        if (eps > tol) rep.offending.push_back(e.id);
    }
    rep.is_exact = rep.max_eps <= tol;
    return rep;
}

RelaxedSolution reconstruct(const RelaxedSolution& sol, const ActiveGraph& g) {
    const Network& net = g.network();
    TheoremReport thm = g.check_theorem1();
    if (!thm.holds) {
        std::string msg = "reconstruction requires the exactness conditions;";
        for (const std::string& v : thm.violations) msg += " " + v + ";";
        throw InfeasibleError(msg);
    }
    ExactnessReport rep = exactness_report(sol, net, g);

    // per-edge gaps indexed by active-edge position
    std::vector<double> eps(g.edges().size(), 0.0);
    for (size_t a = 0; a < g.edges().size(); ++a)
        if (g.edges()[a].kind == EdgeKind::Pipe) eps[a] = rep.eps_m.at(g.edges()[a].id);

    const int n = static_cast<int>(g.node_ids().size());
    std::vector<double> psi(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int a : g.correction_edges(i)) psi[i] += eps[a];

    RelaxedSolution out = sol;
    out.reconstructed = true;
    for (int i = 0; i < n; ++i) {
        const Node& nd = g.node(i);
        if (nd.kind == NodeKind::Reservoir || nd.kind == NodeKind::TankOutlet) {
            // pinned heads never shift: their correction sets are empty
            if (psi[i] != 0.0)
                throw InfeasibleError("nonzero head shift on pinned node '" + nd.id + "'");
            continue;
        }
        out.schedule.head_m.at(nd.id) += psi[i];
    }
    for (size_t a = 0; a < g.edges().size(); ++a) {
        const ActiveEdge& e = g.edges()[a];
        if (e.kind == EdgeKind::Pipe) {
            const double q = sol.schedule.flow_m3s.at(e.id);
            out.w.at(e.id) = q * q;
            out.schedule.gain_m.at(e.id) = net.edges[e.net_edge].f_d * q * q;
        } else if (e.kind == EdgeKind::Valve && g.merge_nodes().count(e.head)) {
            out.schedule.gain_m.at(e.id) += psi[e.tail];
        }
    }
    return out;
}

SpeedRecovery recover_pump_speeds(const Schedule& s, const Network& net, double slack) {
    SpeedRecovery out;
    for (const Edge& e : net.edges) {
        if (e.kind != EdgeKind::Pump) continue;
        auto git = s.gain_m.find(e.id);
        auto qit = s.flow_m3s.find(e.id);
        if (git == s.gain_m.end() || qit == s.flow_m3s.end()) continue;  // pump off
        const PumpParams& p = *e.pump;
        const double q = qit->second, h = git->second;
        const double disc = p.b * p.b * q * q - 4.0 * p.c * (p.a * q * q - h);
        if (disc < -1e-12 * (1.0 + std::fabs(h)))
            throw InfeasibleError("pump '" + e.id + "': no real speed for Q=" +
                                  std::to_string(q) + ", H=" + std::to_string(h));
        // with b,c > 0 and Q >= 0 the minus root is nonpositive
        double w = (-p.b * q + std::sqrt(std::max(disc, 0.0))) / (2.0 * p.c);
        bool clamped = false;
        if (w < p.w_min || w > p.w_max) {
            const double excess = w < p.w_min ? p.w_min - w : w - p.w_max;
            if (excess > slack)
                throw InfeasibleError("pump '" + e.id + "': recovered speed " + std::to_string(w) +
                                      " outside [" + std::to_string(p.w_min) + ", " +
                                      std::to_string(p.w_max) + "]");
            out.warnings.push_back("pump " + e.id + ": speed " + std::to_string(w) +
                                   " clamped into the allowed band");
            w = std::min(std::max(w, p.w_min), p.w_max);
            clamped = true;
        }
        if (!clamped) {
            const double resid = pump_head_gain(q, w, p) - h;
            if (std::fabs(resid) > 1e-8)
                throw InfeasibleError("pump '" + e.id + "': curve residual " +
                                      std::to_string(resid) + " after speed recovery");
        }
        out.omega[e.id] = w;
    }
    return out;
}

}  // namespace wdn
