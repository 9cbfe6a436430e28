#pragma once

#include <cstddef>
#include <string>
#include <vector>

// Dense linear-algebra kernels used by the conic solver. Every kernel has a
// serial reference implementation and an OpenMP variant; the two are written
// so that each output element is produced by the same sequence of floating
// point operations, which makes results bitwise identical for any thread
// count. Tests compare the variants exactly; tools/bench_kernels compares
// their speed.

namespace wdn::linalg {

enum class Backend { Serial, OpenMP };

// Process-wide default backend. OpenMP when compiled in, Serial otherwise.
Backend default_backend();
void set_default_backend(Backend b);

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;  // row-major

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
    double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }
};

// Sparse row: list of (column, coefficient) pairs.
using SparseVec = std::vector<std::pair<int, double>>;

// y = A x
void matvec(const Matrix& A, const std::vector<double>& x, std::vector<double>& y,
            Backend backend = default_backend());

namespace serial {
void matvec(const Matrix& A, const std::vector<double>& x, std::vector<double>& y);
int lu_factor(Matrix& A, std::vector<int>& ipiv);
void row_activities(const std::vector<SparseVec>& rows, const std::vector<double>& x,
                    std::vector<double>& act);
}  // namespace serial

namespace par {
void matvec(const Matrix& A, const std::vector<double>& x, std::vector<double>& y);
int lu_factor(Matrix& A, std::vector<int>& ipiv);
void row_activities(const std::vector<SparseVec>& rows, const std::vector<double>& x,
                    std::vector<double>& act);
}  // namespace par

// In-place LU with partial pivoting. Returns 0 on success, or k+1 when the
// pivot in column k is exactly zero (singular to working precision).
int lu_factor(Matrix& A, std::vector<int>& ipiv, Backend backend = default_backend());

// Solve A x = b with a factorization from lu_factor. b is overwritten by x.
void lu_solve(const Matrix& LU, const std::vector<int>& ipiv, std::vector<double>& b);

// act[i] = rows[i] . x  (one activity per sparse row)
void row_activities(const std::vector<SparseVec>& rows, const std::vector<double>& x,
                    std::vector<double>& act, Backend backend = default_backend());

double dot(const std::vector<double>& x, const std::vector<double>& y);
double norm_inf(const std::vector<double>& x);

}  // namespace wdn::linalg
