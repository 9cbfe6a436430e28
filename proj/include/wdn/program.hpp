#pragma once

#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "wdn/network.hpp"

namespace wdn {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using SparseTerms = std::vector<std::pair<int, double>>;

// Where a variable came from: the math symbol it stands for and the network
// element it belongs to. bin is the grid index for z/s/Phi variables.
struct Provenance {
    std::string symbol;
    std::string element;
    int bin = -1;
};

struct Variable {
    std::string name;
    double lb = -kInf;
    double ub = kInf;
    bool binary = false;
    Provenance prov;
};

// lo <= terms . x <= hi  (equality when lo == hi)
struct LinRow {
    std::string name;
    std::string family;
    double lo = -kInf;
    double hi = kInf;
    SparseTerms terms;
};

// sum sq_j x_j^2 + lin . x <= hi, all sq coefficients > 0 (convex)
struct QuadRow {
    std::string name;
    std::string family;
    SparseTerms sq;
    SparseTerms lin;
    double hi = 0.0;
};

// Rotated second-order cone with the scalar side fixed to one:
// sum xs_j^2 <= t. Structural record; the solver consumes the QuadRow the
// builder emits alongside it.
struct RotatedCone {
    std::string name;
    int t = -1;
    std::vector<int> xs;
};

struct OneHotGroup {
    std::string name;
    std::vector<int> vars;  // binaries summing to one
};

// Nonconvex reference rows kept only on descriptor programs (N2):
// gain = coef * flow^2
struct QuadEquality {
    std::string name;
    int gain = -1;
    int flow = -1;
    double coef = 0.0;
};

// sum w * x * y <= hi
struct BilinearRow {
    std::string name;
    std::vector<std::tuple<int, int, double>> terms;
    double hi = 0.0;
};

enum class Sense { Minimize, Maximize };

struct Objective {
    Sense sense = Sense::Minimize;
    SparseTerms linear;
    SparseTerms quad;  // sum c x^2, descriptor programs only
    double constant = 0.0;
};

struct ProgramViolation {
    std::string row;
    std::string family;
    double residual = 0.0;
};

// Solver-agnostic optimization problem. Immutable once built (by convention);
// safe to share across solver workers.
struct ConicProgram {
    std::string name;
    std::vector<Variable> vars;
    std::vector<LinRow> rows;
    std::vector<QuadRow> quad_rows;
    std::vector<RotatedCone> cones;
    std::vector<OneHotGroup> one_hot;
    std::vector<QuadEquality> quad_eqs;
    std::vector<BilinearRow> bilinear;
    Objective obj;

    // False when nonconvex pieces (quad_eqs, bilinear, quad objective) are
    // present; such programs are reference descriptors, not solver input.
    bool solvable() const { return quad_eqs.empty() && bilinear.empty() && obj.quad.empty(); }

    int add_var(const std::string& name, double lb, double ub, Provenance prov,
                bool binary = false);
    int var_index(const std::string& name) const;      // -1 when absent
    int find_var(const std::string& symbol, const std::string& element, int bin = -1) const;

    double objective_value(const std::vector<double>& x) const;

    // Residuals of every row family (linear, quadratic, cones, binaries,
    // one-hot sums, nonconvex reference rows) beyond tol.
    std::vector<ProgramViolation> evaluate(const std::vector<double>& x, double tol) const;

    std::string dump_json() const;
    static ConicProgram load_json(const std::string& text);

private:
    std::map<std::string, int> index_;
};

}  // namespace wdn
