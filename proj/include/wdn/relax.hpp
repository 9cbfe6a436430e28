#pragma once

#include <string>
#include <vector>

#include "wdn/active_graph.hpp"
#include "wdn/hydraulics.hpp"
#include "wdn/program.hpp"

namespace wdn {

// Head discretization grids: zeta for pump gains, sigma for tank heads.
// Values are the full point sets zeta_0..zeta_B / sigma_0..sigma_C; the bin
// index sets run 1..B and 1..C.
struct DiscretizationGrid {
    std::vector<double> zeta;
    std::vector<double> sigma;

    int bins_pump() const { return static_cast<int>(zeta.size()) - 1; }
    int bins_tank() const { return static_cast<int>(sigma.size()) - 1; }

    static DiscretizationGrid uniform(int b, double zeta_max, int c, double sigma_max);
    void validate() const;
};

// Relaxed/discretized operating point: schedule plus the auxiliary variables.
struct RelaxedSolution {
    Schedule schedule;
    std::map<std::string, double> w;                    // pipe -> W
    std::map<std::string, std::vector<double>> z;       // pump -> z_1..z_B
    std::map<std::string, std::vector<double>> s;       // tank -> s_1..s_C
    std::map<std::string, std::vector<double>> phi;     // pump -> Phi_1..Phi_B
    double objective = 0.0;
    double bound_gap = 0.0;
    bool reconstructed = false;
};

// Line d q + e lying on or above the pump curve at minimum speed for every q
// (tangent at the midpoint of the flow range). Throws InputError when the
// band between the line and the maximum-speed curve is empty on [q_min,q_max].
std::pair<double, double> fit_pump_lower_line(const PumpParams& p);

// Nonconvex reference problem: harvest objective, exact Darcy equalities and
// the bilinear pump-energy budget. Not solver input; used for feasibility
// cross-checks. Budget and objective rows are scaled by 1/(rho g delta).
ConicProgram build_N2(const Network& net, const ActiveGraph& g, const SlotInput& in,
                      const BigMConstants& big_m);

// N2 with each Darcy equality split into a linear loss row and a
// flow-square cone (the second-order cone relaxation).
ConicProgram build_N3(const Network& net, const ActiveGraph& g, const SlotInput& in,
                      const BigMConstants& big_m);

void discretize_pump_heads(ConicProgram& p, const ActiveGraph& g, const DiscretizationGrid& grid,
                           const BigMConstants& big_m, std::vector<std::string>* warnings = nullptr);

void glover_linearize(ConicProgram& p, const ActiveGraph& g, const std::string& pump_id,
                      const DiscretizationGrid& grid);

void discretize_tank_heads(ConicProgram& p, const ActiveGraph& g, const SlotInput& in,
                           const DiscretizationGrid& grid, const BigMConstants& big_m,
                           std::vector<std::string>* warnings = nullptr);

// Full mixed-integer program for the harvest step: cones + discretization +
// Glover rows + linearized energy budget, harvest objective over the s grid.
ConicProgram build_N4(const Network& net, const ActiveGraph& g, const SlotInput& in,
                      const DiscretizationGrid& grid, const BigMConstants& big_m,
                      std::vector<std::string>* warnings = nullptr);

// Same feasible set minus the budget row; objective minimizes pump energy in
// the scale-free form sum (1/eta) sum_b Phi_b zeta_b.
ConicProgram build_M1_relaxed(const Network& net, const ActiveGraph& g, const SlotInput& in,
                              const DiscretizationGrid& grid, const BigMConstants& big_m,
                              std::vector<std::string>* warnings = nullptr);

// Solution vector -> typed solution, via variable provenance.
RelaxedSolution decode_solution(const ConicProgram& p, const ActiveGraph& g,
                                const std::vector<double>& x);

// Typed solution -> solution vector for the given program. Missing pieces
// (e.g. W for an N3 embed) throw InputError.
std::vector<double> embed_solution(const ConicProgram& p, const RelaxedSolution& sol);

}  // namespace wdn
