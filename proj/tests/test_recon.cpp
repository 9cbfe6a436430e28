#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "support/netgen.hpp"
#include "wdn/bnb.hpp"
#include "wdn/recon.hpp"

using namespace wdn;

namespace {

const PumpParams kStudyPump{-1.0941e-4, 5.1516e-2, 223.32, 0.15, 1.2, 0.0, 20.0, 0.9, {}};

// r --pipe(eps)--> j --valve--> m <--valve-- r2, m --pipe--> t_in => t
struct ChainFixture {
    Network net;
    std::map<std::string, int> y;
    SlotInput slot;
    RelaxedSolution sol;
};

ChainFixture slack_chain(double eps) {
    ChainFixture fx;
    Network& net = fx.net;
    net.nodes.push_back({"r", NodeKind::Reservoir, 12.0, 0.0, {}});
    net.nodes.push_back({"r2", NodeKind::Reservoir, 9.0, 0.0, {}});
    net.nodes.push_back({"j", NodeKind::Junction, 0.0, 1.0, {}});
    net.nodes.push_back({"m", NodeKind::Junction, 0.0, 1.0, {}});
    net.nodes.push_back({"t_in", NodeKind::TankInlet, 2.0, 0.0, {}});
    Node tout;
    tout.id = "t";
    tout.kind = NodeKind::TankOutlet;
    tout.tank = TankParams{10.0, 120.0, 40.0};
    net.nodes.push_back(tout);
    auto pipe = [&](const char* id, const char* a, const char* b, double fd) {
        Edge e;
        e.id = id;
        e.tail = a;
        e.head = b;
        e.kind = EdgeKind::Pipe;
        e.f_d = fd;
        net.edges.push_back(e);
    };
    auto valve = [&](const char* id, const char* a, const char* b) {
        Edge e;
        e.id = id;
        e.tail = a;
        e.head = b;
        e.kind = EdgeKind::Valve;
        net.edges.push_back(e);
    };
    pipe("ep", "r", "j", 0.1);
    valve("v1", "j", "m");
    valve("v2", "r2", "m");
    pipe("eq", "m", "t_in", 0.05);
    net.fictitious.emplace_back("t_in", "t");
    net.finalize();
    fx.y = all_on_assignment(net);
    fx.slot.prev_volume_m3["t"] = 40.0;
    fx.slot.prev_head_m["t"] = 4.0;

    Schedule& s = fx.sol.schedule;
    const double q1 = 0.1, q2 = 0.05, qm = q1 + q2;
    s.flow_m3s = {{"ep", q1}, {"v1", q1}, {"v2", q2}, {"eq", qm},
                  {Network::fict_id("t_in", "t"), qm}};
    fx.sol.w["ep"] = q1 * q1 + eps / 0.1;  // slack: f (W - Q^2) = eps
    fx.sol.w["eq"] = qm * qm;
    s.gain_m["ep"] = 0.1 * fx.sol.w["ep"];
    s.gain_m["eq"] = 0.05 * qm * qm;
    // heads off the relaxed pipe equation
    const double tot_j = 12.0 - s.gain_m["ep"];
    const double tot_m = 6.0;
    s.head_m["r"] = 0.0;
    s.head_m["r2"] = 0.0;
    s.head_m["j"] = tot_j;
    s.head_m["m"] = tot_m;
    s.gain_m["v1"] = tot_j - tot_m;
    s.gain_m["v2"] = 9.0 - tot_m;
    s.head_m["t_in"] = tot_m - s.gain_m["eq"] - 2.0;
    const double net_in = qm;
    s.head_m["t"] = 4.0 + 300.0 / 10.0 * net_in;
    s.volume_m3["t"] = 40.0 + 300.0 * net_in;
    fx.sol.objective = 10.0 * s.head_m["t"] * s.head_m["t"];
    return fx;
}

}  // namespace

TEST_CASE("exactness report: gaps, verdicts, cone violations") {
    ChainFixture fx = slack_chain(0.0);
    ActiveGraph g(fx.net, fx.y);
    ExactnessReport rep = exactness_report(fx.sol, fx.net, g);
    CHECK(rep.is_exact);
    CHECK(rep.max_eps == doctest::Approx(0.0));

    ChainFixture fx2 = slack_chain(5e-4);
    ExactnessReport rep2 = exactness_report(fx2.sol, fx2.net, g);
    CHECK(!rep2.is_exact);
    CHECK(rep2.eps_m.at("ep") == doctest::Approx(5e-4).epsilon(1e-9));
    CHECK(rep2.offending == std::vector<std::string>{"ep"});

    // direct evaluation: f_d = 0.001, Q = 1, W = 1.5 -> eps = 5e-4
    CHECK(0.001 * (1.5 - 1.0) == doctest::Approx(5e-4));

    ChainFixture fx3 = slack_chain(0.0);
    fx3.sol.w["ep"] = 0.0;  // below Q^2: cone violated
    CHECK_THROWS_AS(exactness_report(fx3.sol, fx3.net, g), InputError);
}

TEST_CASE("reconstruction on the hand-traced chain") {
    const double eps = 0.3;
    ChainFixture fx = slack_chain(eps);
    ActiveGraph g(fx.net, fx.y);
    REQUIRE(g.check_theorem1().holds);
    RelaxedSolution rec = reconstruct(fx.sol, g);
    CHECK(rec.reconstructed);
    // head at j rises by eps, the valve into the merge absorbs it,
    // everything at and past the merge is untouched
    CHECK(rec.schedule.head_m.at("j") ==
          doctest::Approx(fx.sol.schedule.head_m.at("j") + eps).epsilon(1e-12));
    CHECK(rec.schedule.gain_m.at("v1") ==
          doctest::Approx(fx.sol.schedule.gain_m.at("v1") + eps).epsilon(1e-12));
    CHECK(rec.schedule.gain_m.at("v2") == fx.sol.schedule.gain_m.at("v2"));
    CHECK(rec.schedule.head_m.at("m") == fx.sol.schedule.head_m.at("m"));
    CHECK(rec.schedule.head_m.at("t") == fx.sol.schedule.head_m.at("t"));
    // pipe loss and W reset to the exact values
    const double q1 = 0.1;
    CHECK(rec.w.at("ep") == doctest::Approx(q1 * q1).epsilon(1e-12));
    CHECK(rec.schedule.gain_m.at("ep") == doctest::Approx(0.1 * q1 * q1).epsilon(1e-12));
    // flows, volumes, objective preserved bit for bit
    CHECK(rec.schedule.flow_m3s == fx.sol.schedule.flow_m3s);
    CHECK(rec.schedule.volume_m3 == fx.sol.schedule.volume_m3);
    CHECK(rec.objective == fx.sol.objective);
    // the repaired point passes the full checker
    CHECK(check_schedule(fx.net, g, fx.slot, rec.schedule).empty());
    // already-exact input comes back unchanged
    ChainFixture fx0 = slack_chain(0.0);
    RelaxedSolution rec0 = reconstruct(fx0.sol, g);
    CHECK(rec0.schedule.head_m == fx0.sol.schedule.head_m);
    CHECK(rec0.schedule.gain_m == fx0.sol.schedule.gain_m);
}

TEST_CASE("two gaps on one chain add up") {
    ChainFixture fx = slack_chain(0.25);
    fx.sol.w["eq"] += 0.15 / 0.05;  // second pipe slack, eps = 0.15
    fx.sol.schedule.gain_m["eq"] = 0.05 * fx.sol.w["eq"];
    const double qm = 0.15;
    fx.sol.schedule.head_m["t_in"] =
        fx.sol.schedule.head_m.at("m") - fx.sol.schedule.gain_m.at("eq") - 2.0;
    (void)qm;
    ActiveGraph g(fx.net, fx.y);
    RelaxedSolution rec = reconstruct(fx.sol, g);
    // t_in sits below eq only: psi = eps_eq = 0.15 (ep is blocked by the merge)
    CHECK(rec.schedule.head_m.at("t_in") ==
          doctest::Approx(fx.sol.schedule.head_m.at("t_in") + 0.15).epsilon(1e-9));
    // j sits below ep only: psi = 0.25
    CHECK(rec.schedule.head_m.at("j") ==
          doctest::Approx(fx.sol.schedule.head_m.at("j") + 0.25).epsilon(1e-9));
    CHECK(check_schedule(fx.net, g, fx.slot, rec.schedule).empty());
}

TEST_CASE("reconstruction refuses noncompliant graphs") {
    // two raw pipes into one junction
    Network net;
    net.nodes.push_back({"a", NodeKind::Reservoir, 5.0, 0.0, {}});
    net.nodes.push_back({"b", NodeKind::Reservoir, 5.0, 0.0, {}});
    net.nodes.push_back({"m", NodeKind::Junction, 0.0, 0.0, {}});
    int k = 0;
    for (const char* t : {"a", "b"}) {
        Edge e;
        e.id = "e" + std::to_string(k++);
        e.tail = t;
        e.head = "m";
        e.kind = EdgeKind::Pipe;
        e.f_d = 0.01;
        net.edges.push_back(e);
    }
    net.finalize();
    ActiveGraph g(net, all_on_assignment(net));
    RelaxedSolution sol;
    sol.schedule.head_m = {{"a", 0.0}, {"b", 0.0}, {"m", 4.9}};
    sol.schedule.flow_m3s = {{"e0", 0.1}, {"e1", 0.1}};
    sol.schedule.gain_m = {{"e0", 0.1}, {"e1", 0.1}};
    sol.w = {{"e0", 10.0}, {"e1", 10.0}};
    CHECK_THROWS_AS(reconstruct(sol, g), InfeasibleError);
}

TEST_CASE("speed recovery: shutoff identities and the study pump") {
    Network net;
    net.nodes.push_back({"a", NodeKind::Reservoir, 0.0, 0.0, {}});
    net.nodes.push_back({"b", NodeKind::Junction, 0.0, 0.0, {}});
    Edge e;
    e.id = "p";
    e.tail = "a";
    e.head = "b";
    e.kind = EdgeKind::Pump;
    e.pump = kStudyPump;
    net.edges.push_back(e);
    net.finalize();

    Schedule s;
    s.flow_m3s["p"] = 0.0;
    s.gain_m["p"] = kStudyPump.c;  // shutoff head at nominal speed
    SpeedRecovery r = recover_pump_speeds(s, net);
    CHECK(r.omega.at("p") == doctest::Approx(1.0).epsilon(1e-12));

    s.gain_m["p"] = kStudyPump.c * 1.2 * 1.2;  // shutoff at w_max
    r = recover_pump_speeds(s, net);
    CHECK(r.omega.at("p") == doctest::Approx(1.2).epsilon(1e-12));

    s.flow_m3s["p"] = 10.0;
    s.gain_m["p"] = 223.824219;
    r = recover_pump_speeds(s, net);
    CHECK(r.omega.at("p") == doctest::Approx(1.0).epsilon(1e-7));

    // negative discriminant: no real speed
    s.flow_m3s["p"] = 1.0;
    s.gain_m["p"] = -30.0;
    CHECK_THROWS_AS(recover_pump_speeds(s, net), InfeasibleError);

    // just above the band: clamped with a warning
    s.flow_m3s["p"] = 0.0;
    s.gain_m["p"] = kStudyPump.c * 1.2 * 1.2 + 1e-5;
    r = recover_pump_speeds(s, net, 1e-4);
    CHECK(!r.warnings.empty());
    CHECK(r.omega.at("p") == doctest::Approx(1.2));
    // far above the band: refused
    s.gain_m["p"] = kStudyPump.c * 1.2 * 1.2 + 10.0;
    CHECK_THROWS_AS(recover_pump_speeds(s, net), InfeasibleError);
}

TEST_CASE("speed recovery round-trips random curve points") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uq(0.0, 20.0), uw(0.15, 1.2);
    Network net;
    net.nodes.push_back({"a", NodeKind::Reservoir, 0.0, 0.0, {}});
    net.nodes.push_back({"b", NodeKind::Junction, 0.0, 0.0, {}});
    Edge e;
    e.id = "p";
    e.tail = "a";
    e.head = "b";
    e.kind = EdgeKind::Pump;
    e.pump = kStudyPump;
    net.edges.push_back(e);
    net.finalize();
    for (int i = 0; i < 1000; ++i) {
        const double q = uq(rng), w = uw(rng);
        Schedule s;
        s.flow_m3s["p"] = q;
        s.gain_m["p"] = pump_head_gain(q, w, kStudyPump);
        SpeedRecovery r = recover_pump_speeds(s, net);
        CHECK(std::fabs(r.omega.at("p") - w) <= 1e-8);
    }
}

TEST_CASE("solved relaxations with gaps reconstruct into checked schedules") {
    auto samples = testgen::sample_feasible(1500, 8);
    SolveSettings st;
    int with_gap = 0, reconstructed = 0;
    for (auto& [inst, fwd] : samples) {
        ActiveGraph g(inst.net, inst.y);
        DiscretizationGrid grid = DiscretizationGrid::uniform(4, 60.0, 4, 20.0);
        SlotInput slot = inst.slot;
        slot.r_watt = 3e5;
        ConicProgram p = build_N4(inst.net, g, slot, grid, inst.net.big_m);
        SolveReport rep = branch_and_bound(p, st);
        if (rep.status != SolveStatus::Optimal) continue;
        RelaxedSolution sol = decode_solution(p, g, *rep.incumbent);
        ExactnessReport er = exactness_report(sol, inst.net, g);
        if (!er.is_exact) ++with_gap;
        RelaxedSolution rec = reconstruct(sol, g);
        SpeedRecovery sr = recover_pump_speeds(rec.schedule, inst.net);
        rec.schedule.speed = sr.omega;
        CHECK(check_schedule(inst.net, g, slot, rec.schedule).empty());
        // exact Darcy losses after reconstruction
        for (const ActiveEdge& ae : g.edges()) {
            if (ae.kind != EdgeKind::Pipe) continue;
            const double q = rec.schedule.flow_m3s.at(ae.id);
            CHECK(std::fabs(rec.schedule.gain_m.at(ae.id) -
                            inst.net.edges[ae.net_edge].f_d * q * q) <= kExactTol);
        }
        CHECK(rec.objective == sol.objective);
        ++reconstructed;
    }
    CHECK(reconstructed >= 5);
    (void)with_gap;
}
