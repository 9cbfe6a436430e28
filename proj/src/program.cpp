#include "wdn/program.hpp"

#include <cmath>

#include "json.hpp"

namespace wdn {

using nlohmann::json;

int ConicProgram::add_var(const std::string& name, double lb, double ub, Provenance prov,
                          bool binary) {
    if (index_.count(name)) throw InputError("duplicate variable '" + name + "'");
    Variable v;
    v.name = name;
    v.lb = lb;
    v.ub = ub;
    v.binary = binary;
    v.prov = std::move(prov);
    int idx = static_cast<int>(vars.size());
    vars.push_back(std::move(v));
    index_[name] = idx;
    return idx;
}

int ConicProgram::var_index(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

int ConicProgram::find_var(const std::string& symbol, const std::string& element,
                           int bin) const {
    for (size_t i = 0; i < vars.size(); ++i) {
        const Provenance& p = vars[i].prov;
        if (p.symbol == symbol && p.element == element && p.bin == bin)
            return static_cast<int>(i);
    }
    return -1;
}

double ConicProgram::objective_value(const std::vector<double>& x) const {
    double v = obj.constant;
    for (const auto& [j, c] : obj.linear) v += c * x[j];
    for (const auto& [j, c] : obj.quad) v += c * x[j] * x[j];
    return v;
}

std::vector<ProgramViolation> ConicProgram::evaluate(const std::vector<double>& x,
                                                     double tol) const {
    std::vector<ProgramViolation> out;
    auto add = [&](const std::string& row, const std::string& fam, double res) {
        if (std::fabs(res) > tol) out.push_back({row, fam, res});
    };
    for (size_t j = 0; j < vars.size(); ++j) {
        const Variable& v = vars[j];
        if (x[j] < v.lb - tol) add(v.name, "bounds", x[j] - v.lb);
        if (x[j] > v.ub + tol) add(v.name, "bounds", x[j] - v.ub);
        if (v.binary) {
            double r = std::min(std::fabs(x[j]), std::fabs(x[j] - 1.0));
            add(v.name, "integrality", r);
        }
    }
    // row tolerances scale with the row's coefficients so the test is
    // invariant to how a constraint happens to be written
    auto row_scale = [](double lim, const SparseTerms& a, const SparseTerms& b) {
        double s = 1.0;
        if (std::isfinite(lim)) s = std::max(s, std::fabs(lim));
        for (const auto& [j, c] : a) s = std::max(s, std::fabs(c));
        for (const auto& [j, c] : b) s = std::max(s, std::fabs(c));
        return s;
    };
    for (const LinRow& r : rows) {
        double act = 0.0;
        for (const auto& [j, c] : r.terms) act += c * x[j];
        const double rt = tol * row_scale(r.lo == -kInf ? r.hi : r.lo, r.terms, {});
        if (act < r.lo - rt) add(r.name, r.family, act - r.lo);
        if (act > r.hi + rt) add(r.name, r.family, act - r.hi);
    }
    for (const QuadRow& r : quad_rows) {
        double act = 0.0;
        for (const auto& [j, c] : r.sq) act += c * x[j] * x[j];
        for (const auto& [j, c] : r.lin) act += c * x[j];
        if (act > r.hi + tol * row_scale(r.hi, r.sq, r.lin)) add(r.name, r.family, act - r.hi);
    }
    for (const RotatedCone& c : cones) {
        double s = 0.0;
        for (int j : c.xs) s += x[j] * x[j];
        if (s > x[c.t] + tol) add(c.name, "cone", s - x[c.t]);
    }
    for (const OneHotGroup& g : one_hot) {
        double s = 0.0;
        for (int j : g.vars) s += x[j];
        add(g.name, "one_hot", s - 1.0);
    }
    for (const QuadEquality& qe : quad_eqs)
        add(qe.name, "quadratic_equality", x[qe.gain] - qe.coef * x[qe.flow] * x[qe.flow]);
    for (const BilinearRow& b : bilinear) {
        double s = 0.0;
        for (const auto& [i, j, w] : b.terms) s += w * x[i] * x[j];
        if (s > b.hi + tol) add(b.name, "bilinear_budget", s - b.hi);
    }
    return out;
}

namespace {

json terms_to_json(const SparseTerms& t) {
    json arr = json::array();
    for (const auto& [j, c] : t) arr.push_back({j, c});
    return arr;
}

SparseTerms terms_from_json(const json& j) {
    SparseTerms t;
    for (const auto& e : j) t.emplace_back(e[0].get<int>(), e[1].get<double>());
    return t;
}

json bound_to_json(double v) {
    if (v == kInf) return "+inf";
    if (v == -kInf) return "-inf";
    return v;
}

double bound_from_json(const json& j) {
    if (j.is_string()) return j.get<std::string>() == "+inf" ? kInf : -kInf;
    return j.get<double>();
}

}  // namespace

std::string ConicProgram::dump_json() const {
    json out;
    out["name"] = name;
    out["objective"] = {{"sense", obj.sense == Sense::Minimize ? "min" : "max"},
                        {"linear", terms_to_json(obj.linear)},
                        {"quad", terms_to_json(obj.quad)},
                        {"constant", obj.constant}};
    json jvars = json::array();
    for (const Variable& v : vars) {
        jvars.push_back({{"name", v.name},
                         {"lb", bound_to_json(v.lb)},
                         {"ub", bound_to_json(v.ub)},
                         {"binary", v.binary},
                         {"symbol", v.prov.symbol},
                         {"element", v.prov.element},
                         {"bin", v.prov.bin}});
    }
    out["variables"] = jvars;
    json jrows = json::array();
    for (const LinRow& r : rows)
        jrows.push_back({{"name", r.name},
                         {"family", r.family},
                         {"lo", bound_to_json(r.lo)},
                         {"hi", bound_to_json(r.hi)},
                         {"terms", terms_to_json(r.terms)}});
    out["rows"] = jrows;
    json jq = json::array();
    for (const QuadRow& r : quad_rows)
        jq.push_back({{"name", r.name},
                      {"family", r.family},
                      {"sq", terms_to_json(r.sq)},
                      {"lin", terms_to_json(r.lin)},
                      {"hi", r.hi}});
    out["quad_rows"] = jq;
    json jc = json::array();
    for (const RotatedCone& c : cones) jc.push_back({{"name", c.name}, {"t", c.t}, {"xs", c.xs}});
    out["cones"] = jc;
    json jg = json::array();
    for (const OneHotGroup& g : one_hot) jg.push_back({{"name", g.name}, {"vars", g.vars}});
    out["one_hot"] = jg;
    json jqe = json::array();
    for (const QuadEquality& qe : quad_eqs)
        jqe.push_back({{"name", qe.name}, {"gain", qe.gain}, {"flow", qe.flow}, {"coef", qe.coef}});
    out["quad_equalities"] = jqe;
    json jb = json::array();
    for (const BilinearRow& b : bilinear) {
        json terms = json::array();
        for (const auto& [i, j, w] : b.terms) terms.push_back({i, j, w});
        jb.push_back({{"name", b.name}, {"terms", terms}, {"hi", b.hi}});
    }
    out["bilinear"] = jb;
    return out.dump(2);
}

ConicProgram ConicProgram::load_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("bad program JSON: ") + e.what());
    }
    ConicProgram p;
    try {
        p.name = j.at("name").get<std::string>();
        const json& jo = j.at("objective");
        p.obj.sense = jo.at("sense").get<std::string>() == "min" ? Sense::Minimize : Sense::Maximize;
        p.obj.linear = terms_from_json(jo.at("linear"));
        p.obj.quad = terms_from_json(jo.at("quad"));
        p.obj.constant = jo.at("constant").get<double>();
        for (const auto& jv : j.at("variables")) {
            Provenance prov{jv.at("symbol").get<std::string>(), jv.at("element").get<std::string>(),
                            jv.at("bin").get<int>()};
            p.add_var(jv.at("name").get<std::string>(), bound_from_json(jv.at("lb")),
                      bound_from_json(jv.at("ub")), prov, jv.at("binary").get<bool>());
        }
        for (const auto& jr : j.at("rows")) {
            LinRow r;
            r.name = jr.at("name").get<std::string>();
            r.family = jr.at("family").get<std::string>();
            r.lo = bound_from_json(jr.at("lo"));
            r.hi = bound_from_json(jr.at("hi"));
            r.terms = terms_from_json(jr.at("terms"));
            p.rows.push_back(std::move(r));
        }
        for (const auto& jr : j.at("quad_rows")) {
            QuadRow r;
            r.name = jr.at("name").get<std::string>();
            r.family = jr.at("family").get<std::string>();
            r.sq = terms_from_json(jr.at("sq"));
            r.lin = terms_from_json(jr.at("lin"));
            r.hi = jr.at("hi").get<double>();
            p.quad_rows.push_back(std::move(r));
        }
        for (const auto& jc : j.at("cones")) {
            RotatedCone c;
            c.name = jc.at("name").get<std::string>();
            c.t = jc.at("t").get<int>();
            c.xs = jc.at("xs").get<std::vector<int>>();
            p.cones.push_back(std::move(c));
        }
        for (const auto& jg : j.at("one_hot")) {
            OneHotGroup g;
            g.name = jg.at("name").get<std::string>();
            g.vars = jg.at("vars").get<std::vector<int>>();
            p.one_hot.push_back(std::move(g));
        }
        for (const auto& jq : j.at("quad_equalities")) {
            QuadEquality qe;
            qe.name = jq.at("name").get<std::string>();
            qe.gain = jq.at("gain").get<int>();
            qe.flow = jq.at("flow").get<int>();
            qe.coef = jq.at("coef").get<double>();
            p.quad_eqs.push_back(std::move(qe));
        }
        for (const auto& jb : j.at("bilinear")) {
            BilinearRow b;
            b.name = jb.at("name").get<std::string>();
            for (const auto& t : jb.at("terms"))
                b.terms.emplace_back(t[0].get<int>(), t[1].get<int>(), t[2].get<double>());
            b.hi = jb.at("hi").get<double>();
            p.bilinear.push_back(std::move(b));
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("bad program JSON: ") + e.what());
    }
    return p;
}

}  // namespace wdn
