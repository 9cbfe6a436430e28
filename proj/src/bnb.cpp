#include "wdn/bnb.hpp"
#include <cstdio>
#include <cstdlib>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "json.hpp"

namespace wdn {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::NodeLimit: return "node_limit";
        case SolveStatus::TimeLimit: return "time_limit";
        case SolveStatus::Error: return "error";
    }
    return "?";
}

namespace {

struct Fix {
    int var;
    double lb, ub;
};

struct BnbNode {
    long id = 0;
    long parent = -1;
    double bound = 0.0;  // parent relaxation value, original sense
    std::vector<Fix> fixes;
};

struct Cmp {
    bool maximize;
    bool operator()(const BnbNode& a, const BnbNode& b) const {
        if (a.bound != b.bound) return maximize ? a.bound < b.bound : a.bound > b.bound;
        return a.id > b.id;  // FIFO on ties
    }
};

}  // namespace

SolveReport branch_and_bound(const ConicProgram& p, const SolveSettings& st) {
    if (!p.solvable())
        throw InputError("program '" + p.name + "' contains nonconvex reference rows");
    const auto t_start = std::chrono::steady_clock::now();
    const bool maximize = p.obj.sense == Sense::Maximize;
    const int n = static_cast<int>(p.vars.size());

    SolveReport rep;
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };
    auto better = [&](double a, double b) { return maximize ? a > b : a < b; };
    // a node whose bound cannot improve the incumbent by more than the
    // relative gap tolerance is pruned
    auto prunable = [&](double bound, double inc) {
        const double margin = st.tol_gap * std::max(1.0, std::fabs(inc));
        return maximize ? bound <= inc + margin : bound >= inc - margin;
    };

    std::vector<int> binaries;
    for (int j = 0; j < n; ++j)
        if (p.vars[j].binary) binaries.push_back(j);
    std::vector<int> in_group(n, -1);
    for (size_t gi = 0; gi < p.one_hot.size(); ++gi)
        for (int v : p.one_hot[gi].vars) in_group[v] = static_cast<int>(gi);

    std::vector<double> base_lb(n, -kInf), base_ub(n, kInf);

    auto materialize = [&](const BnbNode& nd, std::vector<double>& lb, std::vector<double>& ub) {
        lb = base_lb;
        ub = base_ub;
        for (const Fix& f : nd.fixes) {
            lb[f.var] = std::max(lb[f.var], f.lb);
            ub[f.var] = std::min(ub[f.var], f.ub);
        }
    };

    auto solve_node = [&](const BnbNode& nd) {
        std::vector<double> lb, ub;
        materialize(nd, lb, ub);
        return solve_socp_bounded(p, st, lb, ub);
    };

    bool have_inc = false;
    std::vector<double> inc_x;
    double inc_obj = maximize ? -kInf : kInf;

    long next_id = 0;
    long trouble_leaves = 0;
    std::vector<double> trouble_bounds;

    auto integral = [&](const std::vector<double>& x) {
        for (int j : binaries) {
            const double r = std::fabs(x[j] - std::llround(x[j]));
            if (r > st.tol_int) return false;
        }
        return true;
    };

    // fix binaries at their rounded values and resolve so incumbents carry
    // exact integer assignments and grid-exact decoded heads. Rounding is
    // one-hot aware: the largest active bin of each group gets the one.
    struct IncumbentOutcome {
        bool certified = false;
        bool resolve_infeasible = false;
    };
    auto try_incumbent = [&](const BnbNode& nd, const std::vector<double>& xrel) {
        IncumbentOutcome outcome;
        BnbNode fixed = nd;
        std::vector<double> lb, ub;
        materialize(nd, lb, ub);
        std::vector<char> grouped(n, 0);
        for (const OneHotGroup& grp : p.one_hot) {
            int best = -1;
            for (int v : grp.vars) {
                grouped[v] = 1;
                if (ub[v] > 0.5 && (best < 0 || xrel[v] > xrel[best])) best = v;
            }
            for (int v : grp.vars) {
                const double val = v == best ? 1.0 : 0.0;
                fixed.fixes.push_back({v, val, val});
            }
        }
        for (int j : binaries) {
            if (grouped[j]) continue;
            const double v = std::llround(xrel[j]) == 1 ? 1.0 : 0.0;
            fixed.fixes.push_back({j, v, v});
        }
        ContResult r = solve_node(fixed);
        outcome.resolve_infeasible = r.status == ContStatus::Infeasible;
        // only exactly-fixed resolves may become incumbents; a near-integral
        // relaxation point can mask an infeasible exact assignment
        const std::vector<double>* cand = nullptr;
        double cobj = 0.0;
        if (r.status == ContStatus::Optimal) {
            cand = &r.x;
            cobj = r.objective;
        }
        if (std::getenv("WDN_BNB_TRACE")) {
            std::fprintf(stderr, "try_incumbent node %ld: resolve=%d", nd.id, (int)r.status);
            if (cand) {
                auto viol = p.evaluate(*cand, st.tol_feas);
                std::fprintf(stderr, " cand_obj=%.6e violations=%zu", cobj, viol.size());
                for (size_t i = 0; i < viol.size() && i < 3; ++i)
                    std::fprintf(stderr, " [%s %.2e]", viol[i].row.c_str(), viol[i].residual);
            }
            std::fprintf(stderr, " msg=%s\n", r.message.c_str());
        }
        if (!cand || !p.evaluate(*cand, st.tol_feas).empty()) return outcome;
        outcome.certified = true;
        if (!have_inc || better(cobj, inc_obj)) {
            have_inc = true;
            inc_x = *cand;
            inc_obj = cobj;
        }
        return outcome;
    };

    std::priority_queue<BnbNode, std::vector<BnbNode>, Cmp> open(Cmp{maximize});
    BnbNode root;
    root.id = next_id++;
    root.bound = maximize ? kInf : -kInf;
    open.push(root);

    SolveStatus ending = SolveStatus::Optimal;
    while (!open.empty()) {
        if (rep.nodes >= st.node_limit) {
            ending = SolveStatus::NodeLimit;
            break;
        }
        if (elapsed() > st.time_limit_s) {
            ending = SolveStatus::TimeLimit;
            break;
        }
        BnbNode nd = open.top();
        open.pop();
        if (have_inc && prunable(nd.bound, inc_obj)) continue;
        ++rep.nodes;

        ContResult r = solve_node(nd);
        if (r.status == ContStatus::NumericalTrouble && std::getenv("WDN_BNB_DUMP")) {
            std::fprintf(stderr, "TROUBLE_NODE %ld:", nd.id);
            for (const Fix& f : nd.fixes)
                std::fprintf(stderr, " %d:%g:%g", f.var, f.lb, f.ub);
            std::fprintf(stderr, "\n");
        }
        if (st.log_nodes)
            rep.node_log.push_back({nd.id, nd.parent,
                                    r.status == ContStatus::Optimal ? r.objective : nd.bound,
                                    r.status == ContStatus::Optimal
                                        ? "relaxed"
                                        : (r.status == ContStatus::Infeasible
                                               ? "infeasible"
                                               : "trouble: " + r.message)});
        if (r.status == ContStatus::Infeasible) continue;

        // pick the branching group before trusting the relaxation: a troubled
        // node can still be split, only a troubled leaf is unresolved
        int branch_group = -1;
        double worst_conv = 2.0;
        if (r.status == ContStatus::Optimal) {
            for (size_t gi = 0; gi < p.one_hot.size(); ++gi) {
                std::vector<double> lb, ub;
                materialize(nd, lb, ub);
                int active = 0;
                double conv = 0.0;
                for (int v : p.one_hot[gi].vars)
                    if (ub[v] > 0.5) {
                        ++active;
                        conv = std::max(conv, r.x[v]);
                    }
                if (active > 1 && conv < worst_conv - 1e-12) {
                    worst_conv = conv;
                    branch_group = static_cast<int>(gi);
                }
            }
        } else {
            for (size_t gi = 0; gi < p.one_hot.size() && branch_group < 0; ++gi) {
                std::vector<double> lb, ub;
                materialize(nd, lb, ub);
                int active = 0;
                for (int v : p.one_hot[gi].vars)
                    if (ub[v] > 0.5) ++active;
                if (active > 1) branch_group = static_cast<int>(gi);
            }
            if (branch_group < 0) {
                ++trouble_leaves;
                trouble_bounds.push_back(nd.bound);
                continue;
            }
        }

        double nd_bound = nd.bound;
        if (r.status == ContStatus::Optimal) {
            nd_bound = r.objective;
            if (have_inc && prunable(nd_bound, inc_obj)) continue;
            if (integral(r.x)) {
                IncumbentOutcome oc = try_incumbent(nd, r.x);
                if (oc.certified) continue;
                if (branch_group >= 0) {
                    // a near-integral relaxation whose exact rounding is
                    // infeasible (grid-pinned states within the integrality
                    // tolerance); keep splitting to separate that assignment
                } else if (oc.resolve_infeasible) {
                    continue;  // fully fixed and genuinely infeasible
                } else {
                    ++trouble_leaves;
                    trouble_bounds.push_back(nd_bound);
                    continue;
                }
            } else if (nd.id == 0 && st.round_heuristic) {
                try_incumbent(nd, r.x);
            }
        }

        if (branch_group < 0) {
            // fractional stray binary (not produced by the builders)
            int bv = -1;
            double frac = -1.0;
            for (int j : binaries) {
                std::vector<double> lb, ub;
                materialize(nd, lb, ub);
                if (ub[j] - lb[j] < 0.5) continue;
                double fr = std::min(r.x[j], 1.0 - r.x[j]);
                if (fr > frac + 1e-12) {
                    frac = fr;
                    bv = j;
                }
            }
            if (bv < 0) {
                IncumbentOutcome oc = try_incumbent(nd, r.x);
                if (!oc.certified && !oc.resolve_infeasible &&
                    (!have_inc || !prunable(nd_bound, inc_obj))) {
                    ++trouble_leaves;
                    trouble_bounds.push_back(nd_bound);
                }
                continue;
            }
            for (double v : {0.0, 1.0}) {
                BnbNode c;
                c.id = next_id++;
                c.parent = nd.id;
                c.bound = nd_bound;
                c.fixes = nd.fixes;
                c.fixes.push_back({bv, v, v});
                open.push(c);
            }
            continue;
        }

        // split the group's active range at the most fractional bin
        const auto& gvars = p.one_hot[branch_group].vars;
        std::vector<double> lb, ub;
        materialize(nd, lb, ub);
        std::vector<int> active;
        for (int v : gvars)
            if (ub[v] > 0.5) active.push_back(v);
        int split = 0;  // position in active: left gets [0..split], right the rest
        if (r.status == ContStatus::Optimal) {
            double best_frac = -1.0;
            for (size_t k = 0; k < active.size(); ++k) {
                double fr = std::min(r.x[active[k]], 1.0 - r.x[active[k]]);
                if (fr > best_frac + 1e-12) {
                    best_frac = fr;
                    split = static_cast<int>(k);
                }
            }
            if (split == static_cast<int>(active.size()) - 1) --split;
        } else {
            split = static_cast<int>(active.size()) / 2 - 1;
        }
        split = std::max(split, 0);
        for (int side = 0; side < 2; ++side) {
            BnbNode c;
            c.id = next_id++;
            c.parent = nd.id;
            c.bound = nd_bound;
            c.fixes = nd.fixes;
            for (size_t k = 0; k < active.size(); ++k) {
                const bool keep = side == 0 ? k <= static_cast<size_t>(split)
                                            : k > static_cast<size_t>(split);
                if (!keep) c.fixes.push_back({active[k], 0.0, 0.0});
            }
            open.push(c);
        }
    }

    // best open bound (valid for every unexplored subtree)
    double open_bound = inc_obj;
    if (!open.empty()) open_bound = open.top().bound;
    for (double b : trouble_bounds)
        if (better(b, open_bound) || !have_inc) open_bound = maximize ? std::max(open_bound, b) : std::min(open_bound, b);

    rep.wall_s = elapsed();
    if (have_inc) {
        rep.incumbent = inc_x;
        rep.incumbent_objective = inc_obj;
        rep.best_bound = open.empty() && trouble_bounds.empty()
                             ? inc_obj
                             : (better(open_bound, inc_obj) ? open_bound : inc_obj);
        rep.gap = std::fabs(rep.incumbent_objective - rep.best_bound) /
                  std::max(1.0, std::fabs(rep.incumbent_objective));
    } else {
        rep.best_bound = open.empty() ? (maximize ? -kInf : kInf) : open_bound;
        rep.gap = kInf;
    }

    if (ending != SolveStatus::Optimal) {
        rep.status = ending;
    } else if (trouble_leaves > 0) {
        bool dominated = have_inc;
        for (double b : trouble_bounds)
            if (!have_inc || !prunable(b, inc_obj)) dominated = false;
        rep.status = dominated ? SolveStatus::Optimal : SolveStatus::Error;
        if (!dominated)
            rep.message = std::to_string(trouble_leaves) + " unresolved nodes with numerical trouble";
    } else if (have_inc) {
        rep.status = SolveStatus::Optimal;
    } else {
        rep.status = SolveStatus::Infeasible;
    }
    if (rep.status == SolveStatus::Optimal && have_inc)
        rep.gap = std::min(rep.gap, st.tol_gap);
    return rep;
}

std::string report_to_json(const SolveReport& r) {
    nlohmann::json j;
    j["status"] = to_string(r.status);
    j["incumbent_objective"] = r.incumbent_objective;
    j["best_bound"] = r.best_bound;
    j["gap"] = r.gap;
    j["nodes"] = r.nodes;
    j["wall_s"] = r.wall_s;
    j["message"] = r.message;
    if (r.incumbent) j["incumbent"] = *r.incumbent;
    return j.dump(2);
}

}  // namespace wdn
