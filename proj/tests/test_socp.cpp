#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "wdn/socp.hpp"

using namespace wdn;

namespace {

SolveSettings st() { return SolveSettings{}; }

}  // namespace

TEST_CASE("1-d lp: min x subject to x >= 3") {
    ConicProgram p;
    p.name = "lp1";
    p.add_var("x", 3.0, kInf, {"x", ""});
    p.obj.linear = {{0, 1.0}};
    ContResult r = solve_socp(p, st());
    REQUIRE(r.status == ContStatus::Optimal);
    CHECK(r.x[0] == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("cone tightness: min t with q^2 <= t, q fixed at 2") {
    ConicProgram p;
    p.name = "cone1";
    int t = p.add_var("t", 0.0, kInf, {"t", ""});
    int q = p.add_var("q", 2.0, 2.0, {"q", ""});
    QuadRow cone;
    cone.name = "cone";
    cone.family = "cone";
    cone.sq = {{q, 1.0}};
    cone.lin = {{t, -1.0}};
    cone.hi = 0.0;
    p.quad_rows.push_back(cone);
    p.obj.linear = {{t, 1.0}};
    ContResult r = solve_socp(p, st());
    REQUIRE(r.status == ContStatus::Optimal);
    CHECK(r.objective == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(r.x[q] == 2.0);  // presolve pins it
}

TEST_CASE("equality rows + quadratic inequality") {
    // min x + y  s.t. x + y + z = 4, x^2 <= z, bounds z <= 2
    ConicProgram p;
    int x = p.add_var("x", -kInf, kInf, {"x", ""});
    int y = p.add_var("y", 0.0, kInf, {"y", ""});
    int z = p.add_var("z", 0.0, 2.0, {"z", ""});
    LinRow eq;
    eq.name = "sum";
    eq.family = "eq";
    eq.lo = eq.hi = 4.0;
    eq.terms = {{x, 1.0}, {y, 1.0}, {z, 1.0}};
    p.rows.push_back(eq);
    QuadRow qr;
    qr.name = "xq";
    qr.family = "cone";
    qr.sq = {{x, 1.0}};
    qr.lin = {{z, -1.0}};
    p.quad_rows.push_back(qr);
    p.obj.linear = {{x, 1.0}, {y, 1.0}};
    ContResult r = solve_socp(p, st());
    REQUIRE(r.status == ContStatus::Optimal);
    // substituting y: objective = 4 - z, so z = 2 and x is any point with
    // x^2 <= 2 and y >= 0
    CHECK(r.x[z] == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(r.x[x] * r.x[x] <= 2.0 + 1e-6);
    CHECK(r.x[y] >= -1e-8);
    CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("maximization sense is honored") {
    ConicProgram p;
    int x = p.add_var("x", 0.0, 5.0, {"x", ""});
    p.obj.sense = Sense::Maximize;
    p.obj.linear = {{x, 2.0}};
    p.obj.constant = 1.0;
    ContResult r = solve_socp(p, st());
    REQUIRE(r.status == ContStatus::Optimal);
    CHECK(r.objective == doctest::Approx(11.0).epsilon(1e-7));
}

TEST_CASE("infeasible box via rows is certified") {
    ConicProgram p;
    int x = p.add_var("x", 0.0, 1.0, {"x", ""});
    LinRow r1;
    r1.name = "ge5";
    r1.family = "r";
    r1.lo = 5.0;
    r1.hi = kInf;
    r1.terms = {{x, 1.0}};
    p.rows.push_back(r1);
    p.obj.linear = {{x, 1.0}};
    ContResult r = solve_socp(p, st());
    CHECK(r.status == ContStatus::Infeasible);
}

TEST_CASE("infeasible quadratic system yields a farkas-style certificate") {
    // x^2 <= -1 is unsatisfiable
    ConicProgram p;
    int x = p.add_var("x", -10.0, 10.0, {"x", ""});
    QuadRow qr;
    qr.name = "bad";
    qr.family = "cone";
    qr.sq = {{x, 1.0}};
    qr.hi = -1.0;
    p.quad_rows.push_back(qr);
    p.obj.linear = {{x, 1.0}};
    ContResult r = solve_socp(p, st());
    REQUIRE(r.status == ContStatus::Infeasible);
    REQUIRE(r.farkas.has_value());
    CHECK(r.farkas->margin > 1e-7);
    // the certificate names the violated row
    bool named = false;
    for (const auto& [name, w] : r.farkas->row_weights)
        if (name.find("bad") != std::string::npos && w > 0.5) named = true;
    CHECK(named);
}

TEST_CASE("randomized socps with constructed optima solve to tolerance") {
    // build instances around a known KKT point: pick x*, make the cone rows
    // active there, choose positive multipliers and set c = -sum lam grad f
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int solved = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 4);
        ConicProgram p;
        std::vector<double> xs(n);
        for (int j = 0; j < n; ++j) {
            xs[j] = u(rng);
            p.add_var("x" + std::to_string(j), -5.0, 5.0, {"x", std::to_string(j)});
        }
        std::vector<double> c(n, 0.0);
        const int m = 2 + static_cast<int>(rng() % 3);
        for (int i = 0; i < m; ++i) {
            // f_i = sum a_j (x_j - s_j)^2 - rhs, active at x*
            QuadRow qr;
            qr.name = "q" + std::to_string(i);
            qr.family = "cone";
            double rhs = 0.0;
            std::vector<double> grad(n, 0.0);
            for (int j = 0; j < n; ++j) {
                const double a = 0.2 + 0.8 * std::fabs(u(rng));
                const double s = u(rng);
                // a (x-s)^2 = a x^2 - 2 a s x + a s^2
                qr.sq.emplace_back(j, a);
                qr.lin.emplace_back(j, -2.0 * a * s);
                rhs -= a * s * s;
                rhs += a * (xs[j] - s) * (xs[j] - s);
                grad[j] = 2.0 * a * (xs[j] - s);
            }
            qr.hi = rhs;
            p.quad_rows.push_back(qr);
            const double lam = 0.2 + std::fabs(u(rng));
            for (int j = 0; j < n; ++j) c[j] -= lam * grad[j];
        }
        for (int j = 0; j < n; ++j) p.obj.linear.emplace_back(j, c[j]);
        const double expect = [&] {
            double v = 0.0;
            for (int j = 0; j < n; ++j) v += c[j] * xs[j];
            return v;
        }();
        ContResult r = solve_socp(p, st());
        if (r.status != ContStatus::Optimal) continue;
        ++solved;
        CHECK(r.objective == doctest::Approx(expect).epsilon(1e-5));
        CHECK(p.evaluate(r.x, 1e-6).empty());
    }
    CHECK(solved >= 28);  // constructions are occasionally degenerate
}

TEST_CASE("feasible-but-not-strict instances are handled") {
    // equalities pin x to its upper bound; the barrier needs the built-in
    // relaxation to accept this
    ConicProgram p;
    int x = p.add_var("x", 0.0, 1.0, {"x", ""});
    int y = p.add_var("y", 0.0, 2.0, {"y", ""});
    LinRow eq;
    eq.name = "pin";
    eq.family = "eq";
    eq.lo = eq.hi = 3.0;
    eq.terms = {{x, 1.0}, {y, 1.0}};
    p.rows.push_back(eq);
    p.obj.linear = {{y, 1.0}};
    ContResult r = solve_socp(p, st());
    REQUIRE(r.status == ContStatus::Optimal);
    CHECK(r.x[x] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("determinism: identical solves give identical results") {
    ConicProgram p;
    int x = p.add_var("x", -kInf, kInf, {"x", ""});
    int y = p.add_var("y", 0.0, kInf, {"y", ""});
    QuadRow qr;
    qr.name = "c";
    qr.family = "cone";
    qr.sq = {{x, 1.0}};
    qr.lin = {{y, -1.0}};
    p.quad_rows.push_back(qr);
    LinRow row;
    row.name = "l";
    row.family = "r";
    row.lo = 1.0;
    row.hi = kInf;
    row.terms = {{x, 1.0}, {y, 0.5}};
    p.rows.push_back(row);
    p.obj.linear = {{y, 1.0}, {x, 0.1}};
    ContResult a = solve_socp(p, st());
    ContResult b = solve_socp(p, st());
    REQUIRE(a.status == ContStatus::Optimal);
    REQUIRE(b.status == ContStatus::Optimal);
    CHECK(a.objective == b.objective);
    CHECK(a.x == b.x);
    CHECK(a.iterations == b.iterations);
}
