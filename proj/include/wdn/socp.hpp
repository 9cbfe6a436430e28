#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wdn/program.hpp"

namespace wdn {

struct SolveSettings {
    double tol_feas = 1e-6;   // feasibility tolerance on reported points
    double tol_gap = 1e-6;    // relative incumbent/bound gap
    double tol_int = 1e-5;    // integrality tolerance
    long node_limit = 20000;
    double time_limit_s = 1e9;
    std::string branching = "least_converged_group";
    int max_ipm_iters = 120;
    bool log_nodes = false;        // keep a per-node trace in the report
    bool round_heuristic = true;   // root rounding heuristic for incumbents
};

enum class ContStatus { Optimal, Infeasible, NumericalTrouble };

// Phase-I multipliers witnessing infeasibility: a convex combination of the
// inequality rows whose infimum over the equality-feasible set is positive.
struct FarkasCertificate {
    std::vector<std::pair<std::string, double>> row_weights;
    double margin = 0.0;  // attained minimax constraint value
};

struct ContResult {
    ContStatus status = ContStatus::NumericalTrouble;
    std::vector<double> x;         // full-length point (original variable order)
    double objective = 0.0;        // original sense
    int iterations = 0;
    double primal_res = 0.0;
    double dual_res = 0.0;
    double gap = 0.0;              // surrogate duality gap, scaled space
    std::optional<FarkasCertificate> farkas;
    std::string message;
};

// Primal-dual interior-point solve of the continuous relaxation: binaries
// are treated as [0,1] boxes, every other constraint as written. The program
// must be convex (solvable()).
ContResult solve_socp(const ConicProgram& p, const SolveSettings& s);

// Same, with per-variable bound overrides (intersected with the program
// bounds); this is the branch-and-bound entry point.
ContResult solve_socp_bounded(const ConicProgram& p, const SolveSettings& s,
                              const std::vector<double>& lb_over,
                              const std::vector<double>& ub_over);

}  // namespace wdn
