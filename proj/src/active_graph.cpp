#include "wdn/active_graph.hpp"

#include <algorithm>
#include <functional>

namespace wdn {

std::map<std::string, int> all_on_assignment(const Network& net) {
    std::map<std::string, int> y;
    for (const Edge& e : net.edges) y[e.id] = 1;
    return y;
}

ActiveGraph build_active_subgraph(const Network& net, const std::map<std::string, int>& y) {
    return ActiveGraph(net, y);
}

ActiveGraph::ActiveGraph(const Network& net, const std::map<std::string, int>& y) : net_(&net) {
    for (const Edge& e : net.edges) {
        auto it = y.find(e.id);
        if (it == y.end())
            throw InputError("on/off assignment is missing edge '" + e.id + "'");
        if (it->second != 0 && it->second != 1)
            throw InputError("on/off assignment for edge '" + e.id + "' must be 0 or 1");
    }
    for (const auto& [id, v] : y)
        net.edge_index(id);  // throws on ids that are not edges

    // Candidate edge list: physical edges with y=1, plus fictitious edges
    // whenever both endpoints survive. Node removal can cascade, so iterate
    // removal of isolated nodes to a fixed point.
    std::set<std::string> alive;
    for (const Node& n : net.nodes) alive.insert(n.id);

    auto edge_active = [&](const Edge& e) {
        return y.at(e.id) == 1 && alive.count(e.tail) && alive.count(e.head);
    };
    bool changed = true;
    while (changed) {
        changed = false;
        std::set<std::string> touched;
        for (const Edge& e : net.edges)
            if (edge_active(e)) {
                touched.insert(e.tail);
                touched.insert(e.head);
            }
        for (const auto& [in, out] : net.fictitious)
            if (alive.count(in) && alive.count(out)) {
                touched.insert(in);
                touched.insert(out);
            }
        for (auto it = alive.begin(); it != alive.end();) {
            if (!touched.count(*it)) {
                it = alive.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
        if (alive.empty()) break;
    }

    for (const Node& n : net.nodes)
        if (alive.count(n.id)) {
            idx_[n.id] = static_cast<int>(node_ids_.size());
            node_ids_.push_back(n.id);
        }
    for (size_t i = 0; i < net.edges.size(); ++i) {
        const Edge& e = net.edges[i];
        if (!edge_active(e)) continue;
        edges_.push_back({e.id, idx_.at(e.tail), idx_.at(e.head), e.kind, static_cast<int>(i)});
    }
    for (const auto& [in, out] : net.fictitious)
        if (alive.count(in) && alive.count(out))
            edges_.push_back({Network::fict_id(in, out), idx_.at(in), idx_.at(out),
                              EdgeKind::Fictitious, -1});

    build_caches();
}

int ActiveGraph::index_of(const std::string& id) const {
    auto it = idx_.find(id);
    if (it == idx_.end()) throw InputError("node '" + id + "' is not in the active graph");
    return it->second;
}

void ActiveGraph::build_caches() {
    const int n = static_cast<int>(node_ids_.size());
    in_.assign(n, {});
    out_.assign(n, {});
    for (size_t a = 0; a < edges_.size(); ++a) {
        in_[edges_[a].head].push_back(static_cast<int>(a));
        out_[edges_[a].tail].push_back(static_cast<int>(a));
    }
    for (int i = 0; i < n; ++i)
        if (in_[i].size() >= 2) merge_nodes_.insert(i);

    // Reachability closure by DFS from each node; graphs are desk scale.
    reach_.assign(n, std::vector<char>(n, 0));
    for (int s = 0; s < n; ++s) {
        std::vector<int> stack = {s};
        reach_[s][s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int a : out_[v]) {
                int w = edges_[a].head;
                if (!reach_[s][w]) {
                    reach_[s][w] = 1;
                    stack.push_back(w);
                }
            }
        }
    }

    parts_.assign(n, {});
    for (int i = 0; i < n; ++i) {
        NodePartition& p = parts_[i];
        for (int v = 0; v < n; ++v) {
            if (v == i) continue;
            bool up = reach_[v][i] != 0;
            bool down = reach_[i][v] != 0;
            if (up && down) continue;  // on a cycle through i; partition is
                                       // only meaningful for loop-free graphs
            if (up)
                p.upstream.insert(v);
            else if (down)
                p.downstream.insert(v);
        }
        for (int v = 0; v < n; ++v) {
            if (v == i || p.upstream.count(v) || p.downstream.count(v)) continue;
            bool near_up = false, near_down = false;
            for (int u : p.upstream)
                if (reach_[v][u] || reach_[u][v]) {
                    near_up = true;
                    break;
                }
            if (!near_up)
                for (int d : p.downstream)
                    if (reach_[v][d] || reach_[d][v]) {
                        near_down = true;
                        break;
                    }
            if (near_up)
                p.upstream_comp.insert(v);
            else if (near_down)
                p.downstream_comp.insert(v);
            else
                p.downstream_comp.insert(v);  // disconnected remainder
        }
    }

    corr_.assign(n, {});
    for (int i = 0; i < n; ++i) {
        for (size_t a = 0; a < edges_.size(); ++a) {
            const ActiveEdge& e = edges_[a];
            if (e.kind != EdgeKind::Pipe) continue;
            if (!reach_[e.head][i]) continue;  // covers head == i as well
            if (merge_set_between(e.head, i).empty()) corr_[i].push_back(static_cast<int>(a));
        }
    }
}

int ActiveGraph::max_indegree() const {
    int best = 0;
    for (const auto& v : in_) best = std::max(best, static_cast<int>(v.size()));
    return best;
}

bool ActiveGraph::reaches(int from, int to) const { return reach_[from][to] != 0; }

std::set<int> ActiveGraph::merge_set_between(int i, int j) const {
    std::set<int> out;
    if (!reach_[i][j]) return out;
    for (int v = 0; v < static_cast<int>(node_ids_.size()); ++v) {
        if (v == i) continue;
        if (!reach_[i][v] || !reach_[v][j]) continue;
        if (merge_nodes_.count(v) || node(v).kind == NodeKind::TankOutlet) out.insert(v);
    }
    return out;
}

TheoremReport ActiveGraph::check_theorem1() const {
    TheoremReport rep;
    // Condition 1: no directed cycles. Kahn peeling; leftover nodes lie on
    // cycles and one is reported by walking successors inside the leftover.
    const int n = static_cast<int>(node_ids_.size());
    std::vector<int> indeg(n, 0);
    for (const ActiveEdge& e : edges_) indeg[e.head]++;
    std::vector<int> q;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) q.push_back(i);
    int seen = 0;
    while (!q.empty()) {
        int v = q.back();
        q.pop_back();
        ++seen;
        for (int a : out_[v])
            if (--indeg[edges_[a].head] == 0) q.push_back(edges_[a].head);
    }
    if (seen != n) {
        int start = -1;
        for (int i = 0; i < n; ++i)
            if (indeg[i] > 0) {
                start = i;
                break;
            }
        std::vector<int> walk;
        std::vector<int> mark(n, 0);
        int v = start;
        while (!mark[v]) {
            mark[v] = 1;
            walk.push_back(v);
            for (int a : out_[v])
                if (indeg[edges_[a].head] > 0) {
                    v = edges_[a].head;
                    break;
                }
        }
        std::string cyc = "cycle:";
        bool in_cycle = false;
        for (int w : walk) {
            if (w == v) in_cycle = true;
            if (in_cycle) cyc += " " + node_ids_[w];
        }
        cyc += " -> " + node_ids_[v];
        rep.violations.push_back(cyc);
    }
    // Condition 2: every edge into a merge node is a valve.
    for (int m : merge_nodes_)
        for (int a : in_[m])
            if (edges_[a].kind != EdgeKind::Valve)
                rep.violations.push_back("edge " + edges_[a].id + " into merge node " +
                                         node_ids_[m] + " is a " + to_string(edges_[a].kind) +
                                         ", not a valve");
    rep.holds = rep.violations.empty();
    return rep;
}

}  // namespace wdn
