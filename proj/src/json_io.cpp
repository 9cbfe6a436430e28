#include "wdn/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wdn {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << content;
}

namespace {

json parse(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("bad ") + what + " JSON: " + e.what());
    }
}

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw InputError("unknown key '" + it.key() + "' in " + where);
    }
}

double num(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw InputError("missing '" + std::string(key) + "' in " + where);
    if (!j.at(key).is_number()) throw InputError("'" + std::string(key) + "' in " + where + " must be a number");
    return j.at(key).get<double>();
}

std::string str(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw InputError("missing '" + std::string(key) + "' in " + where);
    return j.at(key).get<std::string>();
}

}  // namespace

Network parse_network(const std::string& text) {
    json j = parse(text, "network");
    expect_keys(j, {"nodes", "edges", "fictitious_edges", "constants", "notes"}, "network");
    Network net;
    if (j.contains("notes"))
        for (const auto& n : j.at("notes")) net.notes.push_back(n.get<std::string>());
    if (j.contains("constants")) {
        const json& c = j.at("constants");
        expect_keys(c, {"M1", "m1", "rho", "g"}, "constants");
        if (c.contains("M1")) net.big_m.m1_head = c.at("M1").get<double>();
        if (c.contains("m1")) net.big_m.m1_flow = c.at("m1").get<double>();
        if (c.contains("rho")) net.rho = c.at("rho").get<double>();
        if (c.contains("g")) net.gravity = c.at("g").get<double>();
    }
    if (!j.contains("nodes") || !j.contains("edges"))
        throw InputError("network needs 'nodes' and 'edges'");
    for (const auto& jn : j.at("nodes")) {
        const std::string where = "node '" + jn.value("id", std::string("?")) + "'";
        expect_keys(jn, {"id", "kind", "elevation_m", "min_head_m", "tank"}, where);
        Node n;
        n.id = str(jn, "id", where);
        const std::string kind = str(jn, "kind", where);
        if (kind == "junction") n.kind = NodeKind::Junction;
        else if (kind == "tank_outlet") n.kind = NodeKind::TankOutlet;
        else if (kind == "tank_inlet") n.kind = NodeKind::TankInlet;
        else if (kind == "reservoir") n.kind = NodeKind::Reservoir;
        else throw InputError("unknown node kind '" + kind + "' in " + where);
        if (jn.contains("elevation_m")) n.elevation_m = num(jn, "elevation_m", where);
        if (jn.contains("min_head_m")) {
            if (n.kind != NodeKind::Junction)
                throw InputError("min_head_m only applies to junctions (" + where + ")");
            n.min_head_m = num(jn, "min_head_m", where);
        }
        if (jn.contains("tank")) {
            const json& t = jn.at("tank");
            expect_keys(t, {"area_m2", "capacity_m3", "initial_m3"}, where + " tank");
            TankParams tp;
            tp.area_m2 = num(t, "area_m2", where);
            tp.capacity_m3 = num(t, "capacity_m3", where);
            tp.initial_m3 = num(t, "initial_m3", where);
            n.tank = tp;
        }
        net.nodes.push_back(std::move(n));
    }
    for (const auto& je : j.at("edges")) {
        const std::string where = "edge '" + je.value("id", std::string("?")) + "'";
        expect_keys(je, {"id", "tail", "head", "kind", "pipe", "pump", "valve"}, where);
        Edge e;
        e.id = str(je, "id", where);
        e.tail = str(je, "tail", where);
        e.head = str(je, "head", where);
        const std::string kind = str(je, "kind", where);
        if (kind == "pipe") {
            e.kind = EdgeKind::Pipe;
            if (!je.contains("pipe")) throw InputError(where + ": missing 'pipe' object");
            expect_keys(je.at("pipe"), {"f_d"}, where + " pipe");
            e.f_d = num(je.at("pipe"), "f_d", where);
        } else if (kind == "pump") {
            e.kind = EdgeKind::Pump;
            if (!je.contains("pump")) throw InputError(where + ": missing 'pump' object");
            const json& p = je.at("pump");
            expect_keys(p, {"a", "b", "c", "w_min", "w_max", "q_min", "q_max", "eta"},
                        where + " pump");
            PumpParams pp;
            pp.a = num(p, "a", where);
            pp.b = num(p, "b", where);
            pp.c = num(p, "c", where);
            pp.w_min = num(p, "w_min", where);
            pp.w_max = num(p, "w_max", where);
            pp.q_min = num(p, "q_min", where);
            pp.q_max = num(p, "q_max", where);
            pp.eta = num(p, "eta", where);
            e.pump = pp;
        } else if (kind == "valve") {
            e.kind = EdgeKind::Valve;
            if (je.contains("valve")) expect_keys(je.at("valve"), {}, where + " valve");
        } else {
            throw InputError("unknown edge kind '" + kind + "' in " + where);
        }
        net.edges.push_back(std::move(e));
    }
    if (j.contains("fictitious_edges"))
        for (const auto& f : j.at("fictitious_edges")) {
            if (!f.is_array() || f.size() != 2)
                throw InputError("fictitious_edges entries are [inlet, outlet] pairs");
            net.fictitious.emplace_back(f[0].get<std::string>(), f[1].get<std::string>());
        }
    net.finalize();
    return net;
}

Network load_network(const std::string& path) { return parse_network(read_file(path)); }

Scenario parse_scenario(const std::string& text) {
    json j = parse(text, "scenario");
    expect_keys(j, {"slots", "r_bar_watt", "delta_s", "generator"}, "scenario");
    Scenario sc;
    sc.r_bar_watt = num(j, "r_bar_watt", "scenario");
    sc.delta_s = num(j, "delta_s", "scenario");
    if (!(sc.delta_s > 0)) throw InputError("delta_s must be > 0");
    if (!(sc.r_bar_watt > 0)) throw InputError("r_bar_watt must be > 0");
    if (j.contains("slots"))
        for (const auto& js : j.at("slots")) {
            const std::string where = "slot " + std::to_string(js.value("k", -1));
            expect_keys(js, {"k", "demands_m3_per_h", "price_per_kwh", "r_watt"}, where);
            ScenarioSlot s;
            s.k = static_cast<int>(num(js, "k", where));
            s.price_per_kwh = num(js, "price_per_kwh", where);
            s.r_watt = num(js, "r_watt", where);
            if (s.r_watt < 0 || s.r_watt > sc.r_bar_watt + 1e-9)
                throw InputError(where + ": r_watt outside [0, r_bar_watt]");
            if (js.contains("demands_m3_per_h"))
                for (auto it = js.at("demands_m3_per_h").begin();
                     it != js.at("demands_m3_per_h").end(); ++it) {
                    const double d = it.value().get<double>();
                    if (d < 0) throw InputError(where + ": negative demand at " + it.key());
                    s.demands_m3h[it.key()] = d;
                }
            sc.slots.push_back(std::move(s));
        }
    if (j.contains("generator")) {
        const json& g = j.at("generator");
        expect_keys(g, {"slots", "demand_ranges_m3_per_h", "price_per_kwh", "r_range_watt"},
                    "generator");
        ScenarioGenerator gen;
        gen.slots = static_cast<int>(num(g, "slots", "generator"));
        gen.price_per_kwh = num(g, "price_per_kwh", "generator");
        if (g.contains("r_range_watt")) {
            gen.r_range_watt[0] = g.at("r_range_watt")[0].get<double>();
            gen.r_range_watt[1] = g.at("r_range_watt")[1].get<double>();
        } else {
            gen.r_range_watt = {0.0, sc.r_bar_watt};
        }
        if (g.contains("demand_ranges_m3_per_h"))
            for (auto it = g.at("demand_ranges_m3_per_h").begin();
                 it != g.at("demand_ranges_m3_per_h").end(); ++it)
                gen.demand_ranges_m3h[it.key()] = {it.value()[0].get<double>(),
                                                   it.value()[1].get<double>()};
        sc.generator = gen;
    }
    if (sc.slots.empty() && !sc.generator)
        throw InputError("scenario needs 'slots' or a 'generator' block");
    return sc;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

std::map<std::string, int> load_assignment(const std::string& path) {
    json j = parse(read_file(path), "assignment");
    std::map<std::string, int> y;
    for (auto it = j.begin(); it != j.end(); ++it) y[it.key()] = it.value().get<int>();
    return y;
}

std::string schedule_to_json(const RelaxedSolution& sol, int slot_k) {
    json j;
    j["k"] = slot_k;
    j["reconstructed"] = sol.reconstructed;
    j["objective"] = sol.objective;
    j["bound_gap"] = sol.bound_gap;
    j["head_m"] = sol.schedule.head_m;
    j["flow_m3s"] = sol.schedule.flow_m3s;
    j["gain_m"] = sol.schedule.gain_m;
    j["volume_m3"] = sol.schedule.volume_m3;
    j["omega"] = sol.schedule.speed;
    j["w"] = sol.w;
    j["z"] = sol.z;
    j["s"] = sol.s;
    j["phi"] = sol.phi;
    return j.dump(2);
}

RelaxedSolution schedule_from_json(const std::string& text) {
    json j = parse(text, "schedule");
    RelaxedSolution sol;
    try {
        sol.reconstructed = j.value("reconstructed", false);
        sol.objective = j.value("objective", 0.0);
        sol.bound_gap = j.value("bound_gap", 0.0);
        auto get_map = [&](const char* key) {
            std::map<std::string, double> m;
            if (j.contains(key)) m = j.at(key).get<std::map<std::string, double>>();
            return m;
        };
        sol.schedule.head_m = get_map("head_m");
        sol.schedule.flow_m3s = get_map("flow_m3s");
        sol.schedule.gain_m = get_map("gain_m");
        sol.schedule.volume_m3 = get_map("volume_m3");
        sol.schedule.speed = get_map("omega");
        sol.w = get_map("w");
        auto get_vecs = [&](const char* key) {
            std::map<std::string, std::vector<double>> m;
            if (j.contains(key)) m = j.at(key).get<std::map<std::string, std::vector<double>>>();
            return m;
        };
        sol.z = get_vecs("z");
        sol.s = get_vecs("s");
        sol.phi = get_vecs("phi");
    } catch (const json::exception& e) {
        throw InputError(std::string("bad schedule JSON: ") + e.what());
    }
    return sol;
}

std::string audit_to_json(const AuditReport& a) {
    json j;
    j["pumps_j"] = a.pumps_j;
    j["reservoirs_j"] = a.reservoirs_j;
    j["losses_j"] = a.losses_j;
    j["tanks_j"] = a.tanks_j;
    j["demand_j"] = a.demand_j;
    j["imbalance_j"] = a.imbalance_j;
    j["pumps_electrical_j"] = a.pumps_electrical_j;
    j["per_element_j"] = a.per_element_j;
    return j.dump(2);
}

std::string audit_to_csv(const AuditReport& a) {
    std::ostringstream os;
    os << "term,joules\n";
    os << "pumps," << a.pumps_j << "\n";
    os << "reservoirs," << a.reservoirs_j << "\n";
    os << "tanks," << a.tanks_j << "\n";
    os << "losses," << a.losses_j << "\n";
    os << "demand," << a.demand_j << "\n";
    os << "imbalance," << a.imbalance_j << "\n";
    return os.str();
}

}  // namespace wdn
