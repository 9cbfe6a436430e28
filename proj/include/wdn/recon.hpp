#pragma once

#include <map>
#include <string>
#include <vector>

#include "wdn/active_graph.hpp"
#include "wdn/relax.hpp"

namespace wdn {

inline constexpr double kExactTol = 1e-6;  // meters

struct ExactnessReport {
    std::map<std::string, double> eps_m;  // pipe -> f_d (W - Q^2)
    double max_eps = 0.0;
    bool is_exact = false;
    std::vector<std::string> offending;   // pipes with eps > tolerance
};

// Per-pipe relaxation gap and verdict. Throws InputError when some W sits
// below Q^2 beyond the feasibility tolerance (cone violated).
ExactnessReport exactness_report(const RelaxedSolution& sol, const Network& net,
                                 const ActiveGraph& g, double tol = kExactTol);

// Head-shift construction: flows, volumes, pump gains and the discretization
// variables are copied; node heads rise by the summed correction-set gaps;
// pipe losses and W are reset to the exact Darcy values; valve losses into
// merge nodes absorb the shift of their tail. Refuses graphs that fail the
// exactness conditions.
RelaxedSolution reconstruct(const RelaxedSolution& sol, const ActiveGraph& g);

struct SpeedRecovery {
    std::map<std::string, double> omega;  // per on-pump
    std::vector<std::string> warnings;
};

// Inverts the pump curve for each on-pump in the schedule: the unique
// nonnegative root of c w^2 + b Q w + (a Q^2 - H) = 0. Results outside the
// speed band by at most `slack` are clamped with a warning; farther outside,
// or a negative discriminant, is an error.
SpeedRecovery recover_pump_speeds(const Schedule& s, const Network& net, double slack = 1e-6);

}  // namespace wdn
