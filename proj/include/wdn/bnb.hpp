#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wdn/program.hpp"
#include "wdn/socp.hpp"

namespace wdn {

enum class SolveStatus { Optimal, Infeasible, NodeLimit, TimeLimit, Error };

std::string to_string(SolveStatus s);

struct NodeLog {
    long id = 0;
    long parent = -1;
    double bound = 0.0;
    std::string note;
};

struct SolveReport {
    SolveStatus status = SolveStatus::Error;
    std::optional<std::vector<double>> incumbent;  // full-length point
    double incumbent_objective = 0.0;
    double best_bound = 0.0;
    double gap = 0.0;   // |incumbent - bound| / max(1, |incumbent|)
    long nodes = 0;
    double wall_s = 0.0;
    std::string message;
    std::vector<NodeLog> node_log;  // filled when settings.log_nodes
};

// Best-bound branch and bound over the binary variables. One-hot groups are
// branched as range dichotomies; stray binaries (none are produced by the
// builders) fall back to 0/1 branching. Deterministic for fixed settings.
SolveReport branch_and_bound(const ConicProgram& p, const SolveSettings& s);

std::string report_to_json(const SolveReport& r);

}  // namespace wdn
