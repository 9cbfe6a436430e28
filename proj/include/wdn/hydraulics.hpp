#pragma once

#include <map>
#include <string>
#include <vector>

#include "wdn/active_graph.hpp"
#include "wdn/network.hpp"

namespace wdn {

// Absolute feasibility tolerance per scalar constraint, SI units.
inline constexpr double kFeasTol = 1e-6;

// Everything revealed at the start of slot k, plus the carried tank state.
struct SlotInput {
    int k = 1;
    std::map<std::string, double> demand_m3s;   // junction -> demand
    double price_per_j = 0.0;                   // lambda, $/J
    double r_watt = 0.0;                        // demand response signal
    std::map<std::string, double> prev_volume_m3;  // tank outlet -> V[k-1]
    std::map<std::string, double> prev_head_m;     // tank outlet -> H[k-1]

    double demand(const std::string& node) const {
        auto it = demand_m3s.find(node);
        return it == demand_m3s.end() ? 0.0 : it->second;
    }
};

// A candidate operating point for one slot.
struct Schedule {
    std::map<std::string, double> head_m;       // node -> pressure head H
    std::map<std::string, double> flow_m3s;     // edge (incl. fictitious) -> Q
    std::map<std::string, double> gain_m;       // physical edge -> gain/loss
    std::map<std::string, double> volume_m3;    // tank outlet -> V
    std::map<std::string, double> speed;        // pump -> omega
};

struct Violation {
    std::string constraint;  // family name, e.g. "flow_conservation"
    std::string element;     // node or edge id
    double residual = 0.0;
};

// Per-slot energy audit. All terms in joules; imbalance is
// (pumps + reservoirs) - (tanks + losses + demand).
struct AuditReport {
    double pumps_j = 0.0;       // hydraulic energy added by pumps
    double reservoirs_j = 0.0;
    double losses_j = 0.0;      // friction + valve + tank-spill dissipation
    double tanks_j = 0.0;       // energy absorbed by tanks
    double demand_j = 0.0;      // energy delivered to consumers
    double imbalance_j = 0.0;
    double pumps_electrical_j = 0.0;  // hydraulic / eta; not part of the balance
    std::map<std::string, double> per_element_j;  // losses per edge, signed
};

// H = a Q^2 + b Q w + c w^2
double pump_head_gain(double q, double w, const PumpParams& p);

// H = f_d Q^2
double darcy_head_loss(double q, double f_d);

// rho g delta H Q / eta
double pump_energy(double gain_m, double q, double eta, double rho, double g, double delta_s);

// Checks every physical constraint on the schedule; empty result means
// feasible within tol. Throws InputError if the schedule is not dimensioned
// to the active graph.
std::vector<Violation> check_schedule(const Network& net, const ActiveGraph& g,
                                      const SlotInput& in, const Schedule& s,
                                      double tol = kFeasTol);

// Slot energy audit. The loss and demand terms use total heads (pressure +
// elevation) and the tank term is evaluated at the end-of-slot head so that
// the balance identity closes exactly on any schedule that satisfies the
// flow conservation, tank dynamics and edge coupling constraints.
AuditReport energy_audit(const Network& net, const ActiveGraph& g, const SlotInput& in,
                         const Schedule& s);

}  // namespace wdn
