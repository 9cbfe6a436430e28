// Command-line surface for the scheduling library. Subcommands read JSON
// inputs and write JSON/CSV outputs; exit code 0 on success, 1 on hydraulic
// or solver infeasibility, 2 on malformed input.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wdn/contract.hpp"

namespace fs = std::filesystem;
using namespace wdn;

namespace {

struct CommonArgs {
    std::string network_file;
    std::string scenario_file;
    std::string y_file;
    std::string out_dir;
    int grid_b = 10;
    int grid_c = 10;
    double zeta_max = 40.0;
    double sigma_max = 30.0;
    uint64_t seed = 1;
    double tol_gap = 1e-6;
    long node_limit = 20000;
    int slot = 1;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_scenario) {
    cmd->add_option("--network", a.network_file, "network JSON file")->required();
    if (with_scenario)
        cmd->add_option("--scenario", a.scenario_file, "scenario JSON file")->required();
    cmd->add_option("--y-assignment", a.y_file, "edge on/off assignment JSON (default: all on)");
    cmd->add_option("--grid-b", a.grid_b, "pump head grid bins");
    cmd->add_option("--grid-c", a.grid_c, "tank head grid bins");
    cmd->add_option("--zeta-max", a.zeta_max, "pump head grid maximum (m)");
    cmd->add_option("--sigma-max", a.sigma_max, "tank head grid maximum (m)");
    cmd->add_option("--seed", a.seed, "seed for generated scenarios");
    cmd->add_option("--out-dir", a.out_dir, "output directory");
    cmd->add_option("--tol-gap", a.tol_gap, "relative optimality gap");
    cmd->add_option("--node-limit", a.node_limit, "branch-and-bound node limit");
    cmd->add_option("--slot", a.slot, "slot index for single-slot commands");
}

std::map<std::string, int> assignment(const CommonArgs& a, const Network& net) {
    if (a.y_file.empty()) return all_on_assignment(net);
    std::map<std::string, int> y = all_on_assignment(net);
    for (const auto& [id, v] : load_assignment(a.y_file)) y[id] = v;
    return y;
}

SolveSettings settings(const CommonArgs& a) {
    SolveSettings st;
    st.tol_gap = a.tol_gap;
    st.node_limit = a.node_limit;
    return st;
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) fs::create_directories(dir);
}

SlotInput initial_slot_input(const CommonArgs& a, const Network& net, const Scenario& sc,
                             std::vector<ScenarioSlot>& realized) {
    realized = realize_scenario(sc, a.seed);
    if (a.slot < 1 || a.slot > static_cast<int>(realized.size()))
        throw InputError("slot " + std::to_string(a.slot) + " is not in the scenario");
    std::map<std::string, double> v0, h0;
    for (const std::string& t : net.tank_outlet_ids()) {
        const TankParams& tp = *net.node(t).tank;
        v0[t] = tp.initial_m3;
        h0[t] = tp.initial_m3 / tp.area_m2;
    }
    return slot_input_from(realized[a.slot - 1], net, v0, h0);
}

void write_slot_outputs(const CommonArgs& a, const SlotResult& r) {
    if (a.out_dir.empty()) return;
    ensure_dir(a.out_dir);
    write_file(a.out_dir + "/schedule_slot_" + std::to_string(r.k) + ".json",
               schedule_to_json(r.solution, r.k));
    write_file(a.out_dir + "/audit_slot_" + std::to_string(r.k) + ".json",
               audit_to_json(r.audit));
}

void print_slot_summary(const SlotResult& r) {
    std::printf("slot %d: %s%s pump_energy=%.1f J gamma=%.1f W r=%.1f W gap=%.2e\n", r.k,
                r.step == StepTaken::Step1 ? "step1" : "step2", r.fallback ? " (fallback)" : "",
                r.pump_energy_j, r.gamma_w, r.r_watt, r.solution.bound_gap);
}

int cmd_check_topology(const CommonArgs& a) {
    Network net = load_network(a.network_file);
    ActiveGraph g(net, assignment(a, net));
    TheoremReport rep = g.check_theorem1();
    std::printf("nodes: %zu  edges: %zu  max_indegree: %d\n", g.node_ids().size(),
                g.edges().size(), g.max_indegree());
    if (rep.holds) {
        std::printf("theorem1: holds\n");
        return 0;
    }
    std::printf("theorem1: violated\n");
    for (const std::string& v : rep.violations) std::printf("  %s\n", v.c_str());
    return 1;
}

int cmd_solve_step(const CommonArgs& a, const Scenario& sc, bool step2) {
    Network net = load_network(a.network_file);
    net.slot_s = sc.delta_s;
    ActiveGraph g(net, assignment(a, net));
    std::vector<ScenarioSlot> realized;
    SlotInput in = initial_slot_input(a, net, sc, realized);
    DiscretizationGrid grid =
        DiscretizationGrid::uniform(a.grid_b, a.zeta_max, a.grid_c, a.sigma_max);
    SlotResult r = step1_min_cost(net, g, in, grid, settings(a));
    if (step2) {
        if (!(r.pump_energy_j < in.r_watt * net.slot_s)) {
            std::fprintf(stderr,
                         "step 2 refused: step-1 energy %.1f J already meets the budget %.1f J\n",
                         r.pump_energy_j, in.r_watt * net.slot_s);
            return 1;
        }
        r = step2_max_harvest(net, g, in, grid, settings(a), r);
    }
    print_slot_summary(r);
    if (a.out_dir.empty())
        std::printf("%s\n", schedule_to_json(r.solution, r.k).c_str());
    else
        write_slot_outputs(a, r);
    return 0;
}

int cmd_run_contract(const CommonArgs& a, const Scenario& sc) {
    ContractConfig cfg;
    cfg.network = load_network(a.network_file);
    cfg.network.slot_s = sc.delta_s;
    cfg.y = assignment(a, cfg.network);
    cfg.scenario = sc;
    cfg.grid = DiscretizationGrid::uniform(a.grid_b, a.zeta_max, a.grid_c, a.sigma_max);
    cfg.solver = settings(a);
    cfg.seed = a.seed;
    ContractLedger led = run_contract(cfg);
    for (const SlotResult& r : led.slots) print_slot_summary(r);
    std::printf("totals: pump_energy=%.1f J energy_cost=%.4f imbalance_cost=%.4f\n",
                led.total_pump_energy_j, led.total_energy_cost, led.total_imbalance_cost);
    for (const std::string& e : led.events) std::printf("event: %s\n", e.c_str());
    if (!a.out_dir.empty()) {
        ensure_dir(a.out_dir);
        ensure_dir(a.out_dir + "/schedules");
        ensure_dir(a.out_dir + "/audit");
        write_file(a.out_dir + "/ledger.csv", ledger_csv(led, cfg.network));
        for (const SlotResult& r : led.slots) {
            write_file(a.out_dir + "/schedules/slot_" + std::to_string(r.k) + ".json",
                       schedule_to_json(r.solution, r.k));
            write_file(a.out_dir + "/audit/slot_" + std::to_string(r.k) + ".json",
                       audit_to_json(r.audit));
        }
        std::string ev;
        for (const std::string& e : led.events) ev += e + "\n";
        write_file(a.out_dir + "/events.log", ev);
    }
    return 0;
}

int cmd_audit(const CommonArgs& a, const Scenario& sc, const std::string& schedule_file) {
    Network net = load_network(a.network_file);
    net.slot_s = sc.delta_s;
    ActiveGraph g(net, assignment(a, net));
    std::vector<ScenarioSlot> realized;
    SlotInput in = initial_slot_input(a, net, sc, realized);
    RelaxedSolution sol = schedule_from_json(read_file(schedule_file));
    std::vector<Violation> viol = check_schedule(net, g, in, sol.schedule);
    AuditReport audit = energy_audit(net, g, in, sol.schedule);
    std::printf("violations: %zu\n", viol.size());
    for (const Violation& v : viol)
        std::printf("  %s[%s] residual %.3e\n", v.constraint.c_str(), v.element.c_str(),
                    v.residual);
    if (!a.out_dir.empty()) {
        ensure_dir(a.out_dir);
        write_file(a.out_dir + "/audit_slot_" + std::to_string(in.k) + ".json",
                   audit_to_json(audit));
        write_file(a.out_dir + "/audit_slot_" + std::to_string(in.k) + ".csv",
                   audit_to_csv(audit));
    } else {
        std::printf("%s\n", audit_to_json(audit).c_str());
    }
    return viol.empty() ? 0 : 1;
}

int cmd_reconstruct(const CommonArgs& a, const std::string& schedule_file) {
    Network net = load_network(a.network_file);
    ActiveGraph g(net, assignment(a, net));
    RelaxedSolution sol = schedule_from_json(read_file(schedule_file));
    ExactnessReport rep = exactness_report(sol, net, g);
    std::printf("max_eps: %.6e m  exact: %s\n", rep.max_eps, rep.is_exact ? "yes" : "no");
    RelaxedSolution rec = reconstruct(sol, g);
    SpeedRecovery sr = recover_pump_speeds(rec.schedule, net);
    rec.schedule.speed = sr.omega;
    const std::string out = schedule_to_json(rec, 0);
    if (a.out_dir.empty()) {
        std::printf("%s\n", out.c_str());
    } else {
        ensure_dir(a.out_dir);
        write_file(a.out_dir + "/reconstructed.json", out);
    }
    return 0;
}

int cmd_dump_program(const CommonArgs& a, const Scenario& sc, const std::string& problem) {
    Network net = load_network(a.network_file);
    net.slot_s = sc.delta_s;
    ActiveGraph g(net, assignment(a, net));
    std::vector<ScenarioSlot> realized;
    SlotInput in = initial_slot_input(a, net, sc, realized);
    DiscretizationGrid grid =
        DiscretizationGrid::uniform(a.grid_b, a.zeta_max, a.grid_c, a.sigma_max);
    ConicProgram p;
    if (problem == "n2") p = build_N2(net, g, in, net.big_m);
    else if (problem == "n3") p = build_N3(net, g, in, net.big_m);
    else if (problem == "n4") p = build_N4(net, g, in, grid, net.big_m);
    else if (problem == "m1") p = build_M1_relaxed(net, g, in, grid, net.big_m);
    else throw InputError("unknown problem '" + problem + "' (use m1|n2|n3|n4)");
    const std::string out = p.dump_json();
    if (a.out_dir.empty()) {
        std::printf("%s\n", out.c_str());
    } else {
        ensure_dir(a.out_dir);
        write_file(a.out_dir + "/" + problem + "_slot_" + std::to_string(a.slot) + ".json", out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pressurized water network scheduling and energy harvesting"};
    app.require_subcommand(1);

    CommonArgs a;
    std::string schedule_file, problem = "n4";

    CLI::App* check = app.add_subcommand("check-topology", "exactness conditions on the active graph");
    add_common(check, a, false);
    CLI::App* s1 = app.add_subcommand("solve-step1", "minimum-cost schedule for one slot");
    add_common(s1, a, true);
    CLI::App* s2 = app.add_subcommand("solve-step2", "maximum-harvest schedule for one slot");
    add_common(s2, a, true);
    CLI::App* run = app.add_subcommand("run-contract", "two-step schedule over all slots");
    add_common(run, a, true);
    CLI::App* audit = app.add_subcommand("audit", "check + energy audit of a schedule file");
    add_common(audit, a, true);
    audit->add_option("--schedule", schedule_file, "schedule JSON")->required();
    CLI::App* rec = app.add_subcommand("reconstruct", "exactness repair of a relaxed schedule");
    add_common(rec, a, false);
    rec->add_option("--schedule", schedule_file, "schedule JSON")->required();
    CLI::App* dump = app.add_subcommand("dump-program", "write a program in the dump format");
    add_common(dump, a, true);
    dump->add_option("--problem", problem, "m1|n2|n3|n4");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        Scenario sc;
        if (!a.scenario_file.empty()) sc = load_scenario(a.scenario_file);
        if (check->parsed()) return cmd_check_topology(a);
        if (s1->parsed()) return cmd_solve_step(a, sc, false);
        if (s2->parsed()) return cmd_solve_step(a, sc, true);
        if (run->parsed()) return cmd_run_contract(a, sc);
        if (audit->parsed()) return cmd_audit(a, sc, schedule_file);
        if (rec->parsed()) return cmd_reconstruct(a, schedule_file);
        if (dump->parsed()) return cmd_dump_program(a, sc, problem);
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
