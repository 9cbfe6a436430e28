#include "wdn/contract.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace wdn {

namespace {

constexpr double kJoulePerKwh = 3.6e6;

// Solve one program end to end: branch and bound, decode, reconstruct when
// the exactness conditions hold, recover speeds, verify, audit.
struct StepOutcome {
    RelaxedSolution solution;
    AuditReport audit;
    SolveReport report;
    std::vector<std::string> notes;
};

StepOutcome run_step(const ConicProgram& prog, const Network& net, const ActiveGraph& g,
                     const SlotInput& in, const SolveSettings& st) {
    StepOutcome out;
    out.report = branch_and_bound(prog, st);
    const SolveReport& rep = out.report;
    if (!rep.incumbent)
        throw InfeasibleError("no feasible schedule for " + prog.name + " (" +
                              to_string(rep.status) + (rep.message.empty() ? "" : ": " + rep.message) +
                              ")");
    if (rep.status == SolveStatus::NodeLimit || rep.status == SolveStatus::TimeLimit)
        out.notes.push_back(prog.name + ": stopped at " + to_string(rep.status) + ", gap " +
                            std::to_string(rep.gap));

    out.solution = decode_solution(prog, g, *rep.incumbent);
    out.solution.bound_gap = rep.gap;

    const bool exactness_ok = g.check_theorem1().holds;
    if (exactness_ok) {
        out.solution = reconstruct(out.solution, g);
    } else {
        out.notes.push_back(prog.name + ": exactness conditions not met; schedule left relaxed");
    }
    SpeedRecovery sr = recover_pump_speeds(out.solution.schedule, net);
    out.solution.schedule.speed = sr.omega;
    for (const std::string& w : sr.warnings) out.notes.push_back(w);

    if (exactness_ok) {
        std::vector<Violation> viol = check_schedule(net, g, in, out.solution.schedule);
        if (!viol.empty()) {
            std::string msg = prog.name + ": reconstructed schedule fails the checker:";
            for (size_t i = 0; i < viol.size() && i < 5; ++i)
                msg += " " + viol[i].constraint + "[" + viol[i].element + "]=" +
                       std::to_string(viol[i].residual);
            throw InfeasibleError(msg);
        }
    }
    out.audit = energy_audit(net, g, in, out.solution.schedule);
    return out;
}

double electrical_energy_j(const Network& net, const ActiveGraph& g, const Schedule& s) {
    double e = 0.0;
    for (const ActiveEdge& ae : g.edges()) {
        if (ae.kind != EdgeKind::Pump) continue;
        const PumpParams& p = *net.edges[ae.net_edge].pump;
        e += pump_energy(s.gain_m.at(ae.id), s.flow_m3s.at(ae.id), p.eta, net.rho, net.gravity,
                         net.slot_s);
    }
    return e;
}

double harvest_j(const Network& net, const ActiveGraph& g, const SlotInput& in,
                 const Schedule& s) {
    double sum = 0.0;
    for (int i = 0; i < static_cast<int>(g.node_ids().size()); ++i) {
        const Node& n = g.node(i);
        if (n.kind != NodeKind::TankOutlet) continue;
        const double h = s.head_m.at(n.id);
        const double hp = in.prev_head_m.at(n.id);
        sum += 0.5 * n.tank->area_m2 * (h * h - hp * hp);
    }
    return net.rho * net.gravity * net.slot_s * sum;
}

void fill_costs(SlotResult& r, const Network& net, const ActiveGraph& g, const SlotInput& in) {
    r.pump_energy_j = electrical_energy_j(net, g, r.solution.schedule);
    r.gamma_w = r.pump_energy_j / net.slot_s;
    r.r_watt = in.r_watt;
    r.imbalance_cost = in.price_per_j * std::fabs(r.gamma_w - in.r_watt) * net.slot_s;
    r.energy_cost = in.price_per_j * r.pump_energy_j;
    r.harvest_j = harvest_j(net, g, in, r.solution.schedule);
}

}  // namespace

SlotResult step1_min_cost(const Network& net, const ActiveGraph& g, const SlotInput& in,
                          const DiscretizationGrid& grid, const SolveSettings& st) {
    ConicProgram prog = build_M1_relaxed(net, g, in, grid, net.big_m);
    StepOutcome o = run_step(prog, net, g, in, st);
    SlotResult r;
    r.k = in.k;
    r.step = StepTaken::Step1;
    r.solution = std::move(o.solution);
    r.audit = std::move(o.audit);
    r.report_step1 = std::move(o.report);
    r.notes = std::move(o.notes);
    fill_costs(r, net, g, in);
    return r;
}

SlotResult step2_max_harvest(const Network& net, const ActiveGraph& g, const SlotInput& in,
                             const DiscretizationGrid& grid, const SolveSettings& st,
                             const SlotResult& step1) {
    if (!(step1.pump_energy_j < in.r_watt * net.slot_s))
        throw InputError("step 2 requires the step-1 energy to undershoot the signal budget");
    ConicProgram prog = build_N4(net, g, in, grid, net.big_m);
    StepOutcome o = run_step(prog, net, g, in, st);
    SlotResult r;
    r.k = in.k;
    r.step = StepTaken::Step2;
    r.solution = std::move(o.solution);
    r.audit = std::move(o.audit);
    r.report_step1 = step1.report_step1;
    r.report_step2 = std::move(o.report);
    r.notes = std::move(o.notes);
    fill_costs(r, net, g, in);
    return r;
}

std::vector<ScenarioSlot> realize_scenario(const Scenario& sc, uint64_t seed) {
    std::vector<ScenarioSlot> rows = sc.slots;
    if (sc.generator) {
        const ScenarioGenerator& gen = *sc.generator;
        std::mt19937_64 rng(seed);
        for (int k = 1; k <= gen.slots; ++k) {
            ScenarioSlot s;
            s.k = k;
            s.price_per_kwh = gen.price_per_kwh;
            for (const auto& [node, range] : gen.demand_ranges_m3h) {
                std::uniform_real_distribution<double> d(range[0], range[1]);
                s.demands_m3h[node] = d(rng);
            }
            std::uniform_real_distribution<double> rr(gen.r_range_watt[0],
                                                      std::min(gen.r_range_watt[1], sc.r_bar_watt));
            s.r_watt = rr(rng);
            rows.push_back(std::move(s));
        }
    }
    std::sort(rows.begin(), rows.end(),
              [](const ScenarioSlot& a, const ScenarioSlot& b) { return a.k < b.k; });
    for (size_t i = 0; i < rows.size(); ++i)
        if (rows[i].k != static_cast<int>(i) + 1)
            throw InputError("scenario slots must be numbered 1..K without gaps");
    return rows;
}

SlotInput slot_input_from(const ScenarioSlot& row, const Network& net,
                          const std::map<std::string, double>& prev_v,
                          const std::map<std::string, double>& prev_h) {
    SlotInput in;
    in.k = row.k;
    for (const auto& [node, d] : row.demands_m3h) {
        net.node_index(node);
        in.demand_m3s[node] = d / 3600.0;
    }
    in.price_per_j = row.price_per_kwh / kJoulePerKwh;
    in.r_watt = row.r_watt;
    in.prev_volume_m3 = prev_v;
    in.prev_head_m = prev_h;
    return in;
}

ContractLedger run_contract(const ContractConfig& cfg) {
    ContractLedger led;
    const Network& net = cfg.network;
    ActiveGraph g(net, cfg.y);
    TheoremReport thm = g.check_theorem1();
    if (!thm.holds) {
        led.events.push_back("exactness conditions not met: objective values are bounds only");
        for (const std::string& v : thm.violations) led.events.push_back("  " + v);
    }
    led.events.push_back("seed " + std::to_string(cfg.seed));
    led.realized = realize_scenario(cfg.scenario, cfg.seed);

    std::map<std::string, double> v_state, h_state;
    for (const std::string& t : net.tank_outlet_ids()) {
        const TankParams& tp = *net.node(t).tank;
        v_state[t] = tp.initial_m3;
        h_state[t] = tp.initial_m3 / tp.area_m2;
    }

    for (const ScenarioSlot& row : led.realized) {
        SlotInput in = slot_input_from(row, net, v_state, h_state);
        SlotResult res;
        try {
            res = step1_min_cost(net, g, in, cfg.grid, cfg.solver);
            if (res.pump_energy_j < in.r_watt * net.slot_s) {
                try {
                    res = step2_max_harvest(net, g, in, cfg.grid,
                                            cfg.step2_solver.value_or(cfg.solver), res);
                } catch (const InfeasibleError& e) {
                    res.fallback = true;
                    res.notes.push_back(std::string("step 2 failed, keeping step 1: ") + e.what());
                    led.events.push_back("slot " + std::to_string(in.k) + ": " + e.what());
                }
            }
        } catch (const InfeasibleError& e) {
            led.events.push_back("slot " + std::to_string(in.k) + " failed: " + e.what());
            if (!cfg.continue_on_failure) throw;
            continue;  // carry the last feasible state forward
        }
        for (const std::string& n : res.notes) led.events.push_back("slot " + std::to_string(in.k) + ": " + n);
        for (const std::string& t : net.tank_outlet_ids()) {
            v_state[t] = res.solution.schedule.volume_m3.at(t);
            h_state[t] = res.solution.schedule.head_m.at(t);
        }
        led.total_pump_energy_j += res.pump_energy_j;
        led.total_imbalance_cost += res.imbalance_cost;
        led.total_energy_cost += res.energy_cost;
        led.slots.push_back(std::move(res));
    }
    return led;
}

std::string ledger_csv(const ContractLedger& led, const Network& net) {
    std::ostringstream os;
    os.precision(10);
    std::vector<std::string> tanks = net.tank_outlet_ids();
    os << "k,step,fallback,pump_energy_j,gamma_w,r_w,energy_cost,imbalance_cost,harvest_j";
    for (const std::string& t : tanks) os << ",tank_head_" << t;
    for (const std::string& t : tanks) os << ",tank_vol_" << t;
    os << "\n";
    for (const SlotResult& r : led.slots) {
        os << r.k << "," << (r.step == StepTaken::Step1 ? "step1" : "step2") << ","
           << (r.fallback ? 1 : 0) << "," << r.pump_energy_j << "," << r.gamma_w << ","
           << r.r_watt << "," << r.energy_cost << "," << r.imbalance_cost << "," << r.harvest_j;
        for (const std::string& t : tanks) os << "," << r.solution.schedule.head_m.at(t);
        for (const std::string& t : tanks) os << "," << r.solution.schedule.volume_m3.at(t);
        os << "\n";
    }
    return os.str();
}

}  // namespace wdn
