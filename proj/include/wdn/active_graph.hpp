#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "wdn/network.hpp"

namespace wdn {

// One retained edge of the active subgraph. Fictitious tank edges appear here
// with kind Fictitious; they participate in reachability and indegree.
struct ActiveEdge {
    std::string id;
    int tail = -1;   // index into ActiveGraph::node_ids
    int head = -1;
    EdgeKind kind = EdgeKind::Pipe;
    int net_edge = -1;  // index into Network::edges, -1 for fictitious
};

struct NodePartition {
    std::set<int> upstream;          // U_i: nodes with a directed path to i
    std::set<int> downstream;        // D_i: nodes reachable from i
    std::set<int> upstream_comp;     // U^c_i
    std::set<int> downstream_comp;   // D^c_i
};

struct TheoremReport {
    bool holds = false;
    std::vector<std::string> violations;
};

// Subgraph induced by a fixed on/off assignment y: edges with y=0 removed,
// then isolated nodes removed (iterated to a fixed point). Immutable after
// construction; the sets needed by the exactness results are cached.
class ActiveGraph {
public:
    ActiveGraph(const Network& net, const std::map<std::string, int>& y);

    const Network& network() const { return *net_; }

    const std::vector<std::string>& node_ids() const { return node_ids_; }
    const std::vector<ActiveEdge>& edges() const { return edges_; }
    bool has_node(const std::string& id) const { return idx_.count(id) > 0; }
    int index_of(const std::string& id) const;
    const Node& node(int i) const { return net_->node(node_ids_[i]); }

    const std::vector<int>& in_edges(int i) const { return in_[i]; }
    const std::vector<int>& out_edges(int i) const { return out_[i]; }

    // Maximum indegree over all retained nodes, physical + fictitious edges.
    int max_indegree() const;

    // Nodes with more than one incoming edge (the merge set M). The exactness
    // condition asks for valves on every edge into such a node, so we track
    // merges of any edge kind, not just pipe-pipe merges.
    const std::set<int>& merge_nodes() const { return merge_nodes_; }

    const NodePartition& partition(int i) const { return parts_[i]; }
    NodePartition partition(const std::string& id) const { return parts_[index_of(id)]; }

    // N_{i,j}: tank outlets and merge nodes lying on some directed path from
    // i to j, excluding i, including j. Empty when j is unreachable from i.
    std::set<int> merge_set_between(int i, int j) const;

    // E_i: pipes (i',j') with a path from j' to i (or j' == i) carrying no
    // tank outlet / merge node on the way, i included.
    const std::vector<int>& correction_edges(int i) const { return corr_[i]; }

    // Loop-freedom + all-valve incoming edges at every merge node.
    TheoremReport check_theorem1() const;

    bool reaches(int from, int to) const;  // from == to counts as reachable

private:
    const Network* net_;
    std::vector<std::string> node_ids_;
    std::map<std::string, int> idx_;
    std::vector<ActiveEdge> edges_;
    std::vector<std::vector<int>> in_, out_;
    std::set<int> merge_nodes_;
    std::vector<NodePartition> parts_;
    std::vector<std::vector<int>> corr_;
    std::vector<std::vector<char>> reach_;  // reach_[i][j]: path i -> j (i==j true)

    void build_caches();
};

// Convenience wrappers matching the operation names used elsewhere.
ActiveGraph build_active_subgraph(const Network& net, const std::map<std::string, int>& y);
std::map<std::string, int> all_on_assignment(const Network& net);

}  // namespace wdn
