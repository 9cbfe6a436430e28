#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wdn {

// Thrown for malformed files / assignments. The CLI maps it to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a problem instance is hydraulically infeasible or a guarantee
// precondition fails. The CLI maps it to exit code 1.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class NodeKind { Junction, TankOutlet, TankInlet, Reservoir };
enum class EdgeKind { Pipe, Pump, Valve, Fictitious };

std::string to_string(NodeKind k);
std::string to_string(EdgeKind k);

struct TankParams {
    double area_m2 = 0.0;      // cross-sectional wetted area A
    double capacity_m3 = 0.0;  // V_bar
    double initial_m3 = 0.0;   // V[0]
};

struct Node {
    std::string id;
    NodeKind kind = NodeKind::Junction;
    double elevation_m = 0.0;           // H0
    double min_head_m = 0.0;            // H_lower, junctions only
    std::optional<TankParams> tank;     // TankOutlet only
};

struct PumpParams {
    double a = 0.0;       // s^2/m^5 * m, a < 0
    double b = 0.0;       // s/m^2 * m, b > 0
    double c = 0.0;       // m, c > 0
    double w_min = 0.0;   // normalized speed bounds
    double w_max = 0.0;
    double q_min = 0.0;   // m^3/s
    double q_max = 0.0;
    double eta = 1.0;     // electrical-to-hydraulic efficiency, (0,1]
    // Line d*Q + e sitting above the curve at w_min for all Q; fitted by
    // relax::fit_pump_lower_line and cached here when the program is built.
    std::optional<std::pair<double, double>> lower_line;
};

struct Edge {
    std::string id;
    std::string tail;
    std::string head;
    EdgeKind kind = EdgeKind::Pipe;
    double f_d = 0.0;              // pipe friction, s^2/m^5
    std::optional<PumpParams> pump;
};

struct BigMConstants {
    double m1_head = 1e4;      // M1, coupling big-M (m)
    double m1_flow = 1e-6;     // m1, minimum nonzero flow (m^3/s)
};

// Static description of the water network: nodes, physical edges, one
// fictitious edge per tank joining its inlet node to its outlet node.
struct Network {
    std::vector<Node> nodes;
    std::vector<Edge> edges;                                      // physical
    std::vector<std::pair<std::string, std::string>> fictitious;  // inlet -> outlet
    BigMConstants big_m;
    double rho = 1000.0;       // kg/m^3
    double gravity = 9.81;     // m/s^2
    double slot_s = 300.0;     // slot length (s)
    std::vector<std::string> notes;

    // Validates the invariants and builds the index maps; throws InputError.
    void finalize();

    int node_index(const std::string& id) const;
    int edge_index(const std::string& id) const;
    const Node& node(const std::string& id) const { return nodes[node_index(id)]; }
    const Edge& edge(const std::string& id) const { return edges[edge_index(id)]; }

    std::vector<std::string> tank_outlet_ids() const;
    std::vector<std::string> pump_ids() const;

    // Fictitious edge id for a tank, "fict:<inlet>-><outlet>".
    static std::string fict_id(const std::string& inlet, const std::string& outlet);

private:
    std::map<std::string, int> node_idx_;
    std::map<std::string, int> edge_idx_;
};

}  // namespace wdn
