#pragma once

#include <cstdint>
#include <optional>

#include "wdn/contract.hpp"

// Test-only helpers: seeded random networks that satisfy the exactness
// conditions, and a forward constructor that walks the graph and produces a
// fully physical operating point without touching the optimization stack.
// The forward point is the independent oracle several suites check against.

namespace wdn::testgen {

struct Instance {
    Network net;
    std::map<std::string, int> y;
    SlotInput slot;
};

// Random layered DAG with at most max_nodes nodes: reservoir-fed pump lines,
// optional tank, optional valve-guarded merge. Always Theorem-1 compliant.
Instance random_instance(uint64_t seed, int max_nodes = 12);

// The 4-node harvest toy: reservoir -> pump -> junction -> tank.
Instance toy_instance();

// Toy with a drain: reservoir -> pump -> junction -> tank -> demand junction.
// The drain lets the tank hold its level exactly despite the minimum-flow
// trickle on committed pipes; the dead-end toy cannot.
Instance toy_drain_instance();

// Forward-constructed physical point: flows routed by demand, pump speeds
// picked inside the band, heads propagated from the sources, W = Q^2.
// Returns nothing when the random choices are hydraulically inconsistent.
std::optional<RelaxedSolution> forward_point(const Instance& inst, uint64_t seed);

// Keeps drawing seeds until n forward-constructible instances are found.
std::vector<std::pair<Instance, RelaxedSolution>> sample_feasible(uint64_t seed0, int n,
                                                                  int max_nodes = 12);

}  // namespace wdn::testgen
