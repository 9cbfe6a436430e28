#include "wdn/socp.hpp"
#include <cstdio>
#include <cstdlib>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "wdn/linalg.hpp"

// Primal-dual interior-point method for convex programs with linear
// equalities, linear/convex-quadratic inequalities and variable boxes.
// Notation follows the usual barrier formulation: inequality rows f_i(x) <= 0
// with multipliers lam > 0, equalities A x = b with multipliers nu, surrogate
// gap eta = -sum lam_i f_i(x), Mehrotra-style predictor-corrector steps.

namespace wdn {

namespace {

using linalg::Matrix;

constexpr double kBigBound = 1e9;    // implicit box for otherwise-free variables
constexpr double kIneqRelax = 1e-9;  // slack on inequality rows; keeps instances
                                     // whose feasible set has an exactly-tight
                                     // face strictly feasible for the barrier
constexpr double kFixTol = 1e-10;
constexpr double kEpsFeas = 1e-8;    // internal IPM tolerances (row-scaled space)
constexpr double kEpsGap = 1e-8;

struct StdIneq {
    std::string name;
    SparseTerms sq;   // coef > 0
    SparseTerms lin;
    double hi = 0.0;
};

struct StdEq {
    std::string name;
    SparseTerms terms;
    double rhs = 0.0;
};

struct StdForm {
    enum class PS { Ok, Infeasible, Error };
    PS ps = PS::Ok;
    std::string ps_msg;

    int n = 0;
    std::vector<double> lb, ub;
    std::vector<double> c;
    double c0 = 0.0;
    std::vector<StdEq> eqs;
    std::vector<StdIneq> ineqs;

    int full_n = 0;
    std::vector<int> full2red;       // -1 when fixed
    std::vector<double> fixed_value; // valid for fixed entries
    bool maximize = false;
    double obj_scale = 1.0;

    std::vector<double> expand(const std::vector<double>& xr) const {
        std::vector<double> x(full_n, 0.0);
        for (int j = 0; j < full_n; ++j)
            x[j] = full2red[j] >= 0 ? xr[full2red[j]] : fixed_value[j];
        return x;
    }
};

// ------------------------------------------------------------- presolve ---

struct WorkRow {
    std::string name;
    double lo, hi;
    SparseTerms terms;   // over full variable indices
    bool done = false;
};

StdForm presolve(const ConicProgram& p, const std::vector<double>& lb_over,
                 const std::vector<double>& ub_over) {
    StdForm sf;
    const int N = static_cast<int>(p.vars.size());
    sf.full_n = N;
    sf.maximize = p.obj.sense == Sense::Maximize;

    std::vector<double> wlb(N), wub(N);
    for (int j = 0; j < N; ++j) {
        wlb[j] = std::max(p.vars[j].lb, lb_over[j]);
        wub[j] = std::min(p.vars[j].ub, ub_over[j]);
        if (p.vars[j].binary) {
            wlb[j] = std::max(wlb[j], 0.0);
            wub[j] = std::min(wub[j], 1.0);
        }
        if (wlb[j] > wub[j] + 1e-9) {
            sf.ps = StdForm::PS::Infeasible;
            sf.ps_msg = "conflicting bounds on " + p.vars[j].name;
            return sf;
        }
    }

    std::vector<char> fixed(N, 0);
    std::vector<double> val(N, 0.0);
    auto fix = [&](int j, double v) {
        fixed[j] = 1;
        val[j] = v;
    };
    for (int j = 0; j < N; ++j)
        if (wub[j] - wlb[j] <= kFixTol) fix(j, 0.5 * (wlb[j] + wub[j]));

    std::vector<WorkRow> lin;
    for (const LinRow& r : p.rows) {
        WorkRow w{r.name, r.lo, r.hi, {}, false};
        for (const auto& [j, cf] : r.terms)
            if (cf != 0.0) w.terms.emplace_back(j, cf);
        lin.push_back(std::move(w));
    }

    // quadratic rows whose squared variables are all fixed degrade to linear
    std::vector<QuadRow> quads;
    for (const QuadRow& q : p.quad_rows) quads.push_back(q);

    // iterate: substitute fixed vars, fix singleton equalities, and tighten
    // bounds by interval propagation; this prunes most infeasible
    // branch-and-bound children without any barrier solve
    bool changed = true;
    int rounds = 0;
    while (changed && rounds++ < 25) {
        changed = false;
        for (WorkRow& r : lin) {
            if (r.done) continue;
            double shift = 0.0;
            int free_var = -1, free_cnt = 0;
            double free_coef = 0.0;
            for (const auto& [j, cf] : r.terms) {
                if (fixed[j]) {
                    shift += cf * val[j];
                } else {
                    ++free_cnt;
                    free_var = j;
                    free_coef = cf;
                }
            }
            const double tol = 1e-8 * (1.0 + std::fabs(r.lo) + std::fabs(shift));
            if (free_cnt == 0) {
                if (shift < r.lo - tol || shift > r.hi + tol) {
                    sf.ps = StdForm::PS::Infeasible;
                    sf.ps_msg = "row " + r.name + " violated after fixing";
                    return sf;
                }
                r.done = true;
                changed = true;
            } else if (free_cnt == 1 && r.lo == r.hi) {
                const double v = (r.lo - shift) / free_coef;
                const double btol = 1e-8 * (1.0 + std::fabs(v));
                if (v < wlb[free_var] - btol || v > wub[free_var] + btol) {
                    sf.ps = StdForm::PS::Infeasible;
                    sf.ps_msg = "row " + r.name + " forces " + p.vars[free_var].name +
                                " out of bounds";
                    return sf;
                }
                fix(free_var, std::min(std::max(v, wlb[free_var]), wub[free_var]));
                r.done = true;
                changed = true;
            } else {
                // interval propagation over the free terms
                double act_lo = shift, act_hi = shift;
                int inf_lo = 0, inf_hi = 0;
                for (const auto& [j, cf] : r.terms) {
                    if (fixed[j]) continue;
                    const double a = cf > 0 ? cf * wlb[j] : cf * wub[j];
                    const double b = cf > 0 ? cf * wub[j] : cf * wlb[j];
                    if (std::isfinite(a)) act_lo += a; else ++inf_lo;
                    if (std::isfinite(b)) act_hi += b; else ++inf_hi;
                }
                const double ptol = 1e-7 * (1.0 + std::fabs(r.lo) + std::fabs(r.hi == kInf ? 0 : r.hi));
                if ((inf_lo == 0 && r.hi < kInf && act_lo > r.hi + ptol) ||
                    (inf_hi == 0 && r.lo > -kInf && act_hi < r.lo - ptol)) {
                    sf.ps = StdForm::PS::Infeasible;
                    sf.ps_msg = "row " + r.name + " inconsistent with variable bounds";
                    return sf;
                }
                for (const auto& [j, cf] : r.terms) {
                    if (fixed[j]) continue;
                    // activity of the row without x_j
                    const double my_lo = cf > 0 ? cf * wlb[j] : cf * wub[j];
                    const double my_hi = cf > 0 ? cf * wub[j] : cf * wlb[j];
                    double rest_lo = inf_lo == 0 || (inf_lo == 1 && !std::isfinite(my_lo))
                                         ? act_lo - (std::isfinite(my_lo) ? my_lo : 0.0)
                                         : -kInf;
                    double rest_hi = inf_hi == 0 || (inf_hi == 1 && !std::isfinite(my_hi))
                                         ? act_hi - (std::isfinite(my_hi) ? my_hi : 0.0)
                                         : kInf;
                    double nlb = -kInf, nub = kInf;
                    if (cf > 0) {
                        if (r.hi < kInf && rest_lo > -kInf) nub = (r.hi - rest_lo) / cf;
                        if (r.lo > -kInf && rest_hi < kInf) nlb = (r.lo - rest_hi) / cf;
                    } else {
                        if (r.hi < kInf && rest_lo > -kInf) nlb = (r.hi - rest_lo) / cf;
                        if (r.lo > -kInf && rest_hi < kInf) nub = (r.lo - rest_hi) / cf;
                    }
                    const double step = 1e-7 * (1.0 + std::fabs(wlb[j]) + std::fabs(wub[j]));
                    const bool trace_ps = std::getenv("WDN_PRESOLVE_TRACE") != nullptr;
                    if (nlb > wlb[j] + step) {
                        if (trace_ps)
                            std::fprintf(stderr, "tighten %s: lb %s %.6g -> %.6g\n", r.name.c_str(),
                                         p.vars[j].name.c_str(), wlb[j], nlb);
                        wlb[j] = nlb;
                        changed = true;
                    }
                    if (nub < wub[j] - step) {
                        if (trace_ps)
                            std::fprintf(stderr, "tighten %s: ub %s %.6g -> %.6g\n", r.name.c_str(),
                                         p.vars[j].name.c_str(), wub[j], nub);
                        wub[j] = nub;
                        changed = true;
                    }
                    if (wlb[j] > wub[j] + 1e-7 * (1.0 + std::fabs(wlb[j]))) {
                        sf.ps = StdForm::PS::Infeasible;
                        sf.ps_msg = "row " + r.name + " empties the domain of " + p.vars[j].name;
                        return sf;
                    }
                    if (wub[j] - wlb[j] <= kFixTol && !fixed[j]) {
                        fix(j, 0.5 * (wlb[j] + wub[j]));
                        changed = true;
                    }
                }
            }
        }
        for (auto it = quads.begin(); it != quads.end();) {
            bool all_sq_fixed = true;
            for (const auto& [j, cf] : it->sq)
                if (!fixed[j]) all_sq_fixed = false;
            if (all_sq_fixed) {
                double shift = 0.0;
                for (const auto& [j, cf] : it->sq) shift += cf * val[j] * val[j];
                WorkRow r;
                r.name = it->name;
                r.lo = -kInf;
                r.hi = it->hi - shift;
                r.terms = it->lin;
                lin.push_back(std::move(r));
                it = quads.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }

    // canonicalize the surviving linear rows and merge duplicates; opposing
    // inequality pairs (e.g. the Glover rows once z is fixed) become
    // equalities handled outside the barrier
    struct Canon {
        SparseTerms terms;
        double lo = -kInf, hi = kInf;
        std::string name;
    };
    std::map<std::vector<std::pair<int, long long>>, Canon> canon;
    auto coef_key = [](double c) { return static_cast<long long>(std::llround(c * 1e12)); };
    for (WorkRow& r : lin) {
        if (r.done) continue;
        double shift = 0.0;
        SparseTerms t;
        for (const auto& [j, cf] : r.terms) {
            if (fixed[j])
                shift += cf * val[j];
            else if (cf != 0.0)
                t.emplace_back(j, cf);
        }
        std::sort(t.begin(), t.end());
        // merge duplicate variables within the row
        SparseTerms tm;
        for (const auto& [j, cf] : t) {
            if (!tm.empty() && tm.back().first == j)
                tm.back().second += cf;
            else
                tm.emplace_back(j, cf);
        }
        tm.erase(std::remove_if(tm.begin(), tm.end(),
                                [](const auto& e) { return e.second == 0.0; }),
                 tm.end());
        double lo = r.lo == -kInf ? -kInf : r.lo - shift;
        double hi = r.hi == kInf ? kInf : r.hi - shift;
        if (tm.empty()) {
            if (0.0 < lo - 1e-8 || 0.0 > hi + 1e-8) {
                sf.ps = StdForm::PS::Infeasible;
                sf.ps_msg = "row " + r.name + " empty and violated";
                return sf;
            }
            continue;
        }
        const double pivot = tm.front().second;
        const double scale = 1.0 / pivot;
        for (auto& [j, cf] : tm) cf *= scale;
        double nlo, nhi;
        if (scale > 0) {
            nlo = lo == -kInf ? -kInf : lo * scale;
            nhi = hi == kInf ? kInf : hi * scale;
        } else {
            nlo = hi == kInf ? -kInf : hi * scale;
            nhi = lo == -kInf ? kInf : lo * scale;
        }
        lo = nlo;
        hi = nhi;
        std::vector<std::pair<int, long long>> key;
        for (const auto& [j, cf] : tm) key.emplace_back(j, coef_key(cf));
        auto [it, inserted] = canon.try_emplace(key);
        Canon& cr = it->second;
        if (inserted) {
            cr.terms = tm;
            cr.name = r.name;
        } else if (cr.name.find(r.name) == std::string::npos) {
            cr.name += "&" + r.name;
        }
        cr.lo = std::max(cr.lo, lo);
        cr.hi = std::min(cr.hi, hi);
        if (cr.lo > cr.hi + 1e-8) {
            sf.ps = StdForm::PS::Infeasible;
            sf.ps_msg = "rows " + cr.name + " conflict";
            return sf;
        }
    }

    // reduced variable indexing
    sf.full2red.assign(N, -1);
    sf.fixed_value.assign(N, 0.0);
    for (int j = 0; j < N; ++j) {
        if (fixed[j]) {
            sf.fixed_value[j] = val[j];
        } else {
            sf.full2red[j] = sf.n++;
            sf.lb.push_back(std::max(wlb[j], -kBigBound));
            sf.ub.push_back(std::min(wub[j], kBigBound));
        }
    }

    auto reduce_terms = [&](const SparseTerms& t) {
        SparseTerms out;
        for (const auto& [j, cf] : t)
            if (!fixed[j]) out.emplace_back(sf.full2red[j], cf);
        return out;
    };

    for (auto& [key, cr] : canon) {
        SparseTerms rt = reduce_terms(cr.terms);
        double nrm = 0.0;
        for (const auto& [j, cf] : rt) nrm = std::max(nrm, std::fabs(cf));
        if (nrm == 0.0) continue;
        const double inv = 1.0 / nrm;
        SparseTerms scaled = rt;
        for (auto& [j, cf] : scaled) cf *= inv;
        if (cr.lo > -kInf && cr.hi < kInf &&
            std::fabs(cr.hi - cr.lo) <= 1e-11 * (1.0 + std::fabs(cr.hi))) {
            sf.eqs.push_back({cr.name, scaled, cr.hi * inv});
        } else {
            if (cr.hi < kInf) {
                double h = cr.hi * inv;
                sf.ineqs.push_back({cr.name, {}, scaled, h + kIneqRelax * (1.0 + std::fabs(h))});
            }
            if (cr.lo > -kInf) {
                SparseTerms neg = scaled;
                for (auto& [j, cf] : neg) cf = -cf;
                double h = -cr.lo * inv;
                sf.ineqs.push_back({cr.name + ":lo", {}, neg, h + kIneqRelax * (1.0 + std::fabs(h))});
            }
        }
    }

    for (const QuadRow& q : quads) {
        StdIneq si;
        si.name = q.name;
        double shift = 0.0;
        for (const auto& [j, cf] : q.sq) {
            if (fixed[j])
                shift += cf * val[j] * val[j];
            else
                si.sq.emplace_back(sf.full2red[j], cf);
        }
        std::map<int, double> linm;
        for (const auto& [j, cf] : q.lin) {
            if (fixed[j])
                shift += cf * val[j];
            else
                linm[sf.full2red[j]] += cf;
        }
        for (const auto& [j, cf] : linm)
            if (cf != 0.0) si.lin.emplace_back(j, cf);
        si.hi = q.hi - shift;
        double nrm = 0.0;
        for (const auto& [j, cf] : si.sq) nrm = std::max(nrm, std::fabs(cf));
        for (const auto& [j, cf] : si.lin) nrm = std::max(nrm, std::fabs(cf));
        if (nrm == 0.0) {
            if (0.0 > si.hi + 1e-8) {
                sf.ps = StdForm::PS::Infeasible;
                sf.ps_msg = "quad row " + q.name + " violated after fixing";
                return sf;
            }
            continue;
        }
        const double inv = 1.0 / nrm;
        for (auto& [j, cf] : si.sq) cf *= inv;
        for (auto& [j, cf] : si.lin) cf *= inv;
        si.hi *= inv;
        si.hi += kIneqRelax * (1.0 + std::fabs(si.hi));
        sf.ineqs.push_back(std::move(si));
    }

    // objective, minimize form, normalized
    std::vector<double> cfull(N, 0.0);
    for (const auto& [j, cf] : p.obj.linear) cfull[j] += cf;
    double c0 = p.obj.constant;
    sf.c.assign(sf.n, 0.0);
    for (int j = 0; j < N; ++j) {
        if (fixed[j])
            c0 += cfull[j] * val[j];
        else
            sf.c[sf.full2red[j]] = sf.maximize ? -cfull[j] : cfull[j];
    }
    sf.c0 = sf.maximize ? -c0 : c0;
    double cs = 1.0;
    for (double v : sf.c) cs = std::max(cs, std::fabs(v));
    sf.obj_scale = cs;
    for (double& v : sf.c) v /= cs;
    sf.c0 /= cs;
    return sf;
}

// ------------------------------------------------------------------ IPM ---

struct IpmOut {
    enum class St { Converged, MaxIter, Stall, Singular };
    St st = St::MaxIter;
    std::vector<double> x;
    std::vector<double> lam;  // general-row multipliers only
    double gap = 0.0, rpri = 0.0, rdual = 0.0, obj = 0.0;
    int iters = 0;
};

class Ipm {
public:
    Ipm(const StdForm& f) : f_(f), n_(f.n), mg_(static_cast<int>(f.ineqs.size())),
                            p_(static_cast<int>(f.eqs.size())) {
        m_ = mg_ + 2 * n_;
        A_ = Matrix(p_, n_);
        b_.assign(p_, 0.0);
        for (int r = 0; r < p_; ++r) {
            for (const auto& [j, cf] : f_.eqs[r].terms) A_(r, j) += cf;
            b_[r] = f_.eqs[r].rhs;
        }
    }

    // stop(x) may end the solve early (used by phase I)
    IpmOut run(std::vector<double> x, int max_iters,
               const std::function<bool(const std::vector<double>&)>& stop = nullptr) {
        std::vector<double> lam(m_), nu(p_, 0.0), fv(m_);
        eval_f(x, fv);
        // unit complementarity products at the start: lam_i (-f_i) = 1
        for (int i = 0; i < m_; ++i) lam[i] = -1.0 / fv[i];

        IpmOut out;
        std::vector<double> rd(n_), rp(p_);
        Matrix K(n_ + p_, n_ + p_);
        std::vector<int> ipiv;
        std::vector<double> rhs(n_ + p_), rhs_aff(n_ + p_);
        std::vector<std::vector<std::pair<int, double>>> grads(mg_);

        const bool trace = std::getenv("WDN_IPM_TRACE") != nullptr;
        double reg = 1e-11;
        for (int it = 0; it < max_iters; ++it) {
            out.iters = it;
            eval_f(x, fv);
            eval_grads(x, grads);
            residuals(x, lam, nu, fv, grads, rd, rp);
            double eta = 0.0;
            for (int i = 0; i < m_; ++i) eta -= lam[i] * fv[i];
            double obj = f_.c0;
            for (int j = 0; j < n_; ++j) obj += f_.c[j] * x[j];
            if (trace)
                std::fprintf(stderr, "  it=%d rpri=%.3e rdual=%.3e eta=%.3e obj=%.8e\n", it,
                             linalg::norm_inf(rp), linalg::norm_inf(rd), eta, obj);
            out.rpri = linalg::norm_inf(rp);
            out.rdual = linalg::norm_inf(rd);
            out.gap = eta;
            out.obj = obj;
            out.x = x;
            out.lam.assign(lam.begin(), lam.begin() + mg_);
            if (stop && stop(x)) {
                out.st = IpmOut::St::Converged;
                return out;
            }
            if (out.rpri <= kEpsFeas && out.rdual <= kEpsFeas &&
                eta <= kEpsGap * (1.0 + std::fabs(obj))) {
                out.st = IpmOut::St::Converged;
                return out;
            }

            // KKT matrix, shared by predictor and corrector
            K.a.assign(K.a.size(), 0.0);
            assemble_h(x, lam, fv, grads, K);
            for (int j = 0; j < n_; ++j) K(j, j) += reg;
            for (int r = 0; r < p_; ++r) {
                for (int j = 0; j < n_; ++j) {
                    K(n_ + r, j) = A_(r, j);
                    K(j, n_ + r) = A_(r, j);
                }
                K(n_ + r, n_ + r) = -reg;
            }
            Matrix LU = K;
            if (linalg::lu_factor(LU, ipiv) != 0) {
                reg *= 100.0;
                if (reg > 1e-4) {
                    out.st = IpmOut::St::Singular;
                    return out;
                }
                continue;
            }

            // predictor (tau = 0)
            build_rhs(x, nu, fv, grads, lam, 0.0, nullptr, rp, rhs_aff);
            linalg::lu_solve(LU, ipiv, rhs_aff);
            std::vector<double> dx_aff(rhs_aff.begin(), rhs_aff.begin() + n_);
            std::vector<double> dlam_aff(m_);
            recover_dlam(x, lam, fv, grads, dx_aff, 0.0, nullptr, dlam_aff);
            double a_aff = max_lam_step(lam, dlam_aff);
            a_aff = shrink_to_interior(x, dx_aff, a_aff, fv);
            double eta_aff = 0.0;
            {
                std::vector<double> xt(n_), ft(m_);
                for (int j = 0; j < n_; ++j) xt[j] = x[j] + a_aff * dx_aff[j];
                eval_f(xt, ft);
                for (int i = 0; i < m_; ++i)
                    eta_aff -= std::max(lam[i] + a_aff * dlam_aff[i], 0.0) * ft[i];
            }
            double sigma = eta > 0 ? std::pow(std::min(1.0, std::max(0.0, eta_aff / eta)), 3) : 0.1;
            double tau = sigma * eta / m_;

            // corrector with second-order complementarity term
            std::vector<double> corr(m_);
            for (int i = 0; i < m_; ++i) {
                double ds = -dir_deriv(i, grads, dx_aff);
                corr[i] = dlam_aff[i] * ds;
            }
            build_rhs(x, nu, fv, grads, lam, tau, &corr, rp, rhs);
            linalg::lu_solve(LU, ipiv, rhs);
            std::vector<double> dx(rhs.begin(), rhs.begin() + n_);
            std::vector<double> dnu(rhs.begin() + n_, rhs.end());
            std::vector<double> dlam(m_);
            recover_dlam(x, lam, fv, grads, dx, tau, &corr, dlam);

            double alpha = 0.995 * max_lam_step(lam, dlam);
            alpha = shrink_to_interior(x, dx, alpha, fv);
            if (alpha < 1e-12) {
                out.st = IpmOut::St::Stall;
                return out;
            }
            // merit backtracking on the full residual norm
            const double phi0 = merit(x, lam, nu, fv, grads, tau, rd, rp);
            int bt = 0;
            std::vector<double> xt(n_), lt(m_), nt(p_), ftv(m_);
            std::vector<std::vector<std::pair<int, double>>> gt(mg_);
            std::vector<double> rdt(n_), rpt(p_);
            while (bt < 40) {
                for (int j = 0; j < n_; ++j) xt[j] = x[j] + alpha * dx[j];
                for (int i = 0; i < m_; ++i) lt[i] = lam[i] + alpha * dlam[i];
                for (int r = 0; r < p_; ++r) nt[r] = nu[r] + alpha * dnu[r];
                eval_f(xt, ftv);
                bool interior = true;
                for (int i = 0; i < m_ && interior; ++i) interior = ftv[i] < 0.0;
                if (interior) {
                    eval_grads(xt, gt);
                    residuals(xt, lt, nt, ftv, gt, rdt, rpt);
                    double phi = merit(xt, lt, nt, ftv, gt, tau, rdt, rpt);
                    if (phi <= (1.0 - 0.01 * alpha) * phi0 + 1e-14) break;
                }
                alpha *= 0.5;
                ++bt;
            }
            if (bt == 40) {
                out.st = IpmOut::St::Stall;
                return out;
            }
            if (trace)
                std::fprintf(stderr, "    sigma=%.3e tau=%.3e a_aff=%.3e alpha=%.3e bt=%d dx0=%.3e\n",
                             sigma, tau, a_aff, alpha, bt, dx.empty() ? 0.0 : dx[0]);
            x = xt;
            lam = lt;
            nu = nt;
        }
        out.st = IpmOut::St::MaxIter;
        return out;
    }

private:
    const StdForm& f_;
    int n_, mg_, p_, m_;
    Matrix A_;
    std::vector<double> b_;

    // constraint order: [0,mg) general rows, [mg, mg+n) x-ub, [mg+n, m) lb-x
    void eval_f(const std::vector<double>& x, std::vector<double>& fv) const {
        fv.resize(m_);
        for (int i = 0; i < mg_; ++i) {
            const StdIneq& q = f_.ineqs[i];
            double v = -q.hi;
            for (const auto& [j, cf] : q.sq) v += cf * x[j] * x[j];
            for (const auto& [j, cf] : q.lin) v += cf * x[j];
            fv[i] = v;
        }
        for (int j = 0; j < n_; ++j) {
            fv[mg_ + j] = x[j] - f_.ub[j];
            fv[mg_ + n_ + j] = f_.lb[j] - x[j];
        }
    }

    void eval_grads(const std::vector<double>& x,
                    std::vector<std::vector<std::pair<int, double>>>& g) const {
        g.resize(mg_);
        for (int i = 0; i < mg_; ++i) {
            std::map<int, double> m;
            for (const auto& [j, cf] : f_.ineqs[i].lin) m[j] += cf;
            for (const auto& [j, cf] : f_.ineqs[i].sq) m[j] += 2.0 * cf * x[j];
            g[i].assign(m.begin(), m.end());
        }
    }

    double dir_deriv(int i, const std::vector<std::vector<std::pair<int, double>>>& g,
                     const std::vector<double>& dx) const {
        if (i < mg_) {
            double s = 0.0;
            for (const auto& [j, cf] : g[i]) s += cf * dx[j];
            return s;
        }
        int j = i - mg_;
        return j < n_ ? dx[j] : -dx[j - n_];
    }

    void residuals(const std::vector<double>& x, const std::vector<double>& lam,
                   const std::vector<double>& nu, const std::vector<double>& fv,
                   const std::vector<std::vector<std::pair<int, double>>>& g,
                   std::vector<double>& rd, std::vector<double>& rp) const {
        (void)fv;
        rd.assign(n_, 0.0);
        for (int j = 0; j < n_; ++j) rd[j] = f_.c[j];
        for (int i = 0; i < mg_; ++i)
            for (const auto& [j, cf] : g[i]) rd[j] += lam[i] * cf;
        for (int j = 0; j < n_; ++j) rd[j] += lam[mg_ + j] - lam[mg_ + n_ + j];
        for (int r = 0; r < p_; ++r) {
            const double* ar = A_.row(r);
            for (int j = 0; j < n_; ++j) rd[j] += ar[j] * nu[r];
        }
        rp.assign(p_, 0.0);
        for (int r = 0; r < p_; ++r) {
            double s = -b_[r];
            const double* ar = A_.row(r);
            for (int j = 0; j < n_; ++j) s += ar[j] * x[j];
            rp[r] = s;
        }
    }

    void assemble_h(const std::vector<double>& x, const std::vector<double>& lam,
                    const std::vector<double>& fv,
                    const std::vector<std::vector<std::pair<int, double>>>& g, Matrix& K) const {
        (void)x;
        for (int i = 0; i < mg_; ++i) {
            for (const auto& [j, cf] : f_.ineqs[i].sq) K(j, j) += lam[i] * 2.0 * cf;
            const double w = lam[i] / (-fv[i]);
            for (const auto& [j1, c1] : g[i])
                for (const auto& [j2, c2] : g[i]) K(j1, j2) += w * c1 * c2;
        }
        for (int j = 0; j < n_; ++j) {
            K(j, j) += lam[mg_ + j] / (-fv[mg_ + j]);
            K(j, j) += lam[mg_ + n_ + j] / (-fv[mg_ + n_ + j]);
        }
    }

    void build_rhs(const std::vector<double>& x, const std::vector<double>& nu,
                   const std::vector<double>& fv,
                   const std::vector<std::vector<std::pair<int, double>>>& g,
                   const std::vector<double>& lam, double tau, const std::vector<double>* corr,
                   const std::vector<double>& rp, std::vector<double>& rhs) const {
        (void)x;
        (void)lam;
        rhs.assign(n_ + p_, 0.0);
        for (int j = 0; j < n_; ++j) rhs[j] = -f_.c[j];
        for (int r = 0; r < p_; ++r) {
            const double* ar = A_.row(r);
            for (int j = 0; j < n_; ++j) rhs[j] -= ar[j] * nu[r];
        }
        for (int i = 0; i < m_; ++i) {
            const double ti = std::max(tau + (corr ? (*corr)[i] : 0.0), 0.0);
            if (ti == 0.0) continue;
            const double w = ti / fv[i];
            if (i < mg_) {
                for (const auto& [j, cf] : g[i]) rhs[j] += w * cf;
            } else if (i < mg_ + n_) {
                rhs[i - mg_] += w;
            } else {
                rhs[i - mg_ - n_] -= w;
            }
        }
        for (int r = 0; r < p_; ++r) rhs[n_ + r] = -rp[r];
    }

    void recover_dlam(const std::vector<double>& x, const std::vector<double>& lam,
                      const std::vector<double>& fv,
                      const std::vector<std::vector<std::pair<int, double>>>& g,
                      const std::vector<double>& dx, double tau, const std::vector<double>* corr,
                      std::vector<double>& dlam) const {
        (void)x;
        dlam.resize(m_);
        for (int i = 0; i < m_; ++i) {
            const double ti = std::max(tau + (corr ? (*corr)[i] : 0.0), 0.0);
            const double gd = dir_deriv(i, g, dx);
            dlam[i] = (-ti - lam[i] * fv[i] - lam[i] * gd) / fv[i];
        }
    }

    static double max_lam_step(const std::vector<double>& lam, const std::vector<double>& dlam) {
        double a = 1.0;
        for (size_t i = 0; i < lam.size(); ++i)
            if (dlam[i] < 0.0) a = std::min(a, -lam[i] / dlam[i]);
        return a;
    }

    double shrink_to_interior(const std::vector<double>& x, const std::vector<double>& dx,
                              double alpha, const std::vector<double>& fv) const {
        (void)fv;
        std::vector<double> xt(n_), ft(m_);
        for (int tries = 0; tries < 60; ++tries) {
            for (int j = 0; j < n_; ++j) xt[j] = x[j] + alpha * dx[j];
            eval_f(xt, ft);
            bool ok = true;
            for (int i = 0; i < m_ && ok; ++i) ok = ft[i] < 0.0;
            if (ok) return alpha;
            alpha *= 0.5;
        }
        return 0.0;
    }

    double merit(const std::vector<double>& x, const std::vector<double>& lam,
                 const std::vector<double>& nu, const std::vector<double>& fv,
                 const std::vector<std::vector<std::pair<int, double>>>& g, double tau,
                 std::vector<double>& rd, std::vector<double>& rp) const {
        residuals(x, lam, nu, fv, g, rd, rp);
        double s = 0.0;
        for (double v : rd) s += v * v;
        for (double v : rp) s += v * v;
        for (int i = 0; i < m_; ++i) {
            double rc = -lam[i] * fv[i] - tau;
            s += rc * rc;
        }
        return std::sqrt(s);
    }
};

std::vector<double> start_point(const StdForm& f) {
    // near zero (the physical scale of most variables), pushed strictly
    // inside the box; plain midpoints misbehave on wide big-M boxes
    std::vector<double> x(f.n);
    for (int j = 0; j < f.n; ++j) {
        const double width = f.ub[j] - f.lb[j];
        const double margin = std::min(1.0, 0.25 * width);
        x[j] = std::min(std::max(0.0, f.lb[j] + margin), f.ub[j] - margin);
    }
    return x;
}

double max_general_violation(const StdForm& f, const std::vector<double>& x) {
    double worst = -kInf;
    for (const StdIneq& q : f.ineqs) {
        double v = -q.hi;
        for (const auto& [j, cf] : q.sq) v += cf * x[j] * x[j];
        for (const auto& [j, cf] : q.lin) v += cf * x[j];
        worst = std::max(worst, v);
    }
    return worst;
}

ContResult solve_std(const StdForm& sf, const SolveSettings& st) {
    ContResult res;
    if (sf.ps == StdForm::PS::Infeasible) {
        res.status = ContStatus::Infeasible;
        res.message = sf.ps_msg;
        return res;
    }
    if (sf.n == 0) {
        res.status = ContStatus::Optimal;
        res.x = sf.expand({});
        res.objective = (sf.maximize ? -1.0 : 1.0) * sf.c0 * sf.obj_scale;
        return res;
    }

    std::vector<double> x0 = start_point(sf);
    if (std::getenv("WDN_IPM_TRACE")) {
        double worst = -kInf;
        const StdIneq* wrow = nullptr;
        for (const StdIneq& q : sf.ineqs) {
            double v = -q.hi;
            for (const auto& [j, cf] : q.sq) v += cf * x0[j] * x0[j];
            for (const auto& [j, cf] : q.lin) v += cf * x0[j];
            if (v > worst) {
                worst = v;
                wrow = &q;
            }
        }
        std::fprintf(stderr, "solve_std: n=%d eq=%zu ineq=%zu worst0=%.3e (%s)\n", sf.n,
                     sf.eqs.size(), sf.ineqs.size(), worst, wrow ? wrow->name.c_str() : "-");
    }
    // worst violation over general rows and real (non-implicit) bounds
    auto max_violation = [&](const std::vector<double>& x) {
        double worst = max_general_violation(sf, x);
        for (int j = 0; j < sf.n; ++j) {
            if (sf.lb[j] > -kBigBound + 1.0) worst = std::max(worst, sf.lb[j] - x[j]);
            if (sf.ub[j] < kBigBound - 1.0) worst = std::max(worst, x[j] - sf.ub[j]);
        }
        return worst;
    };
    if (max_violation(x0) >= -1e-8) {
        // phase I: minimize s over f_i(x) <= s with every general row and
        // every real bound relaxed into s, so conflicts between the equality
        // rows and the bounds are certified rather than stalled on
        StdForm ph = sf;
        ph.c.assign(ph.n, 0.0);
        ph.c0 = 0.0;
        ph.obj_scale = 1.0;
        ph.maximize = false;
        ph.lb.push_back(-kBigBound);
        ph.ub.push_back(kBigBound);
        ph.c.push_back(1.0);
        const int svar = ph.n++;
        for (StdIneq& q : ph.ineqs) q.lin.emplace_back(svar, -1.0);
        for (int j = 0; j < sf.n; ++j) {
            if (sf.lb[j] > -kBigBound + 1.0) {
                ph.ineqs.push_back(
                    {"lb(" + std::to_string(j) + ")", {}, {{j, -1.0}, {svar, -1.0}}, -sf.lb[j]});
                ph.lb[j] = -kBigBound;
            }
            if (sf.ub[j] < kBigBound - 1.0) {
                ph.ineqs.push_back(
                    {"ub(" + std::to_string(j) + ")", {}, {{j, 1.0}, {svar, -1.0}}, sf.ub[j]});
                ph.ub[j] = kBigBound;
            }
        }
        std::vector<double> x1 = x0;
        x1.push_back(max_violation(x0) + 1.0);
        Ipm ipm1(ph);
        auto stop = [&](const std::vector<double>& xs) {
            std::vector<double> xp(xs.begin(), xs.begin() + sf.n);
            return max_violation(xp) <= -1e-8;
        };
        IpmOut o1 = ipm1.run(x1, st.max_ipm_iters, stop);
        std::vector<double> xp(o1.x.begin(), o1.x.begin() + sf.n);
        const double maxf = max_violation(xp);
        if (maxf < -1e-10) {
            x0 = xp;
        } else if (o1.st == IpmOut::St::Converged && o1.obj > 1e-7) {
            res.status = ContStatus::Infeasible;
            res.message = "phase I optimum " + std::to_string(o1.obj);
            FarkasCertificate cert;
            double tot = 0.0;
            for (double l : o1.lam) tot += l;
            if (tot > 0)
                for (size_t i = 0; i < o1.lam.size(); ++i)
                    if (o1.lam[i] / tot > 1e-9)
                        cert.row_weights.emplace_back(ph.ineqs[i].name, o1.lam[i] / tot);
            cert.margin = o1.obj;
            res.farkas = cert;
            return res;
        } else {
            res.status = ContStatus::NumericalTrouble;
            res.message = "phase I inconclusive (max violation " + std::to_string(maxf) + ")";
            return res;
        }
    }

    Ipm ipm(sf);
    IpmOut o = ipm.run(x0, st.max_ipm_iters);
    res.iterations = o.iters;
    res.primal_res = o.rpri;
    res.dual_res = o.rdual;
    res.gap = o.gap;
    res.x = sf.expand(o.x);
    res.objective = (sf.maximize ? -1.0 : 1.0) * o.obj * sf.obj_scale;
    const bool loose_ok = o.rpri <= 1e-6 && o.rdual <= 1e-6 && o.gap <= 1e-6 * (1.0 + std::fabs(o.obj));
    if (o.st == IpmOut::St::Converged || loose_ok) {
        res.status = ContStatus::Optimal;
        if (o.st != IpmOut::St::Converged) res.message = "accepted at loose tolerance";
    } else {
        res.status = ContStatus::NumericalTrouble;
        res.message = "ipm stopped: rpri=" + std::to_string(o.rpri) +
                      " rdual=" + std::to_string(o.rdual) + " gap=" + std::to_string(o.gap);
    }
    return res;
}

}  // namespace

ContResult solve_socp_bounded(const ConicProgram& p, const SolveSettings& s,
                              const std::vector<double>& lb_over,
                              const std::vector<double>& ub_over) {
    if (!p.solvable())
        throw InputError("program '" + p.name + "' contains nonconvex reference rows");
    StdForm sf = presolve(p, lb_over, ub_over);
    return solve_std(sf, s);
}

ContResult solve_socp(const ConicProgram& p, const SolveSettings& s) {
    std::vector<double> lb(p.vars.size(), -kInf), ub(p.vars.size(), kInf);
    return solve_socp_bounded(p, s, lb, ub);
}

}  // namespace wdn
