#include "wdn/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wdn::linalg {

namespace {
Backend g_backend =
#ifdef _OPENMP
    Backend::OpenMP;
#else
    Backend::Serial;
#endif
}  // namespace

Backend default_backend() { return g_backend; }
void set_default_backend(Backend b) { g_backend = b; }

// ---------------------------------------------------------------- serial ---

namespace serial {

void matvec(const Matrix& A, const std::vector<double>& x, std::vector<double>& y) {
    y.assign(A.rows, 0.0);
    for (int i = 0; i < A.rows; ++i) {
        const double* ai = A.row(i);
        double s = 0.0;
        for (int j = 0; j < A.cols; ++j) s += ai[j] * x[j];
        y[i] = s;
    }
}

int lu_factor(Matrix& A, std::vector<int>& ipiv) {
    const int n = A.rows;
    ipiv.resize(n);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(A(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::fabs(A(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        ipiv[k] = piv;
        if (best == 0.0) return k + 1;
        if (piv != k)
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
        const double inv = 1.0 / A(k, k);
        for (int i = k + 1; i < n; ++i) A(i, k) *= inv;
        const double* rk = A.row(k);
        for (int i = k + 1; i < n; ++i) {
            double* ri = A.row(i);
            const double lik = ri[k];
            if (lik == 0.0) continue;
            for (int j = k + 1; j < n; ++j) ri[j] -= lik * rk[j];
        }
    }
    return 0;
}

void row_activities(const std::vector<SparseVec>& rows, const std::vector<double>& x,
                    std::vector<double>& act) {
    act.assign(rows.size(), 0.0);
    for (size_t i = 0; i < rows.size(); ++i) {
        double s = 0.0;
        for (const auto& [j, c] : rows[i]) s += c * x[j];
        act[i] = s;
    }
}

}  // namespace serial

// ---------------------------------------------------------------- OpenMP ---

namespace par {

void matvec(const Matrix& A, const std::vector<double>& x, std::vector<double>& y) {
    y.assign(A.rows, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < A.rows; ++i) {
        const double* ai = A.row(i);
        double s = 0.0;
        for (int j = 0; j < A.cols; ++j) s += ai[j] * x[j];
        y[i] = s;
    }
}

int lu_factor(Matrix& A, std::vector<int>& ipiv) {
    const int n = A.rows;
    ipiv.resize(n);
    for (int k = 0; k < n; ++k) {
        // pivot search stays serial; the trailing update dominates
        int piv = k;
        double best = std::fabs(A(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::fabs(A(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        ipiv[k] = piv;
        if (best == 0.0) return k + 1;
        if (piv != k)
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
        const double inv = 1.0 / A(k, k);
        for (int i = k + 1; i < n; ++i) A(i, k) *= inv;
        const double* rk = A.row(k);
#pragma omp parallel for schedule(static) if (n - k > 64)
        for (int i = k + 1; i < n; ++i) {
            double* ri = A.row(i);
            const double lik = ri[k];
            if (lik == 0.0) continue;
            for (int j = k + 1; j < n; ++j) ri[j] -= lik * rk[j];
        }
    }
    return 0;
}

void row_activities(const std::vector<SparseVec>& rows, const std::vector<double>& x,
                    std::vector<double>& act) {
    act.assign(rows.size(), 0.0);
    const int m = static_cast<int>(rows.size());
#pragma omp parallel for schedule(static) if (m > 256)
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (const auto& [j, c] : rows[i]) s += c * x[j];
        act[i] = s;
    }
}

}  // namespace par

// -------------------------------------------------------------- dispatch ---

void matvec(const Matrix& A, const std::vector<double>& x, std::vector<double>& y, Backend b) {
    if (b == Backend::OpenMP)
        par::matvec(A, x, y);
    else
        serial::matvec(A, x, y);
}

int lu_factor(Matrix& A, std::vector<int>& ipiv, Backend b) {
    return b == Backend::OpenMP ? par::lu_factor(A, ipiv) : serial::lu_factor(A, ipiv);
}

void row_activities(const std::vector<SparseVec>& rows, const std::vector<double>& x,
                    std::vector<double>& act, Backend b) {
    if (b == Backend::OpenMP)
        par::row_activities(rows, x, act);
    else
        serial::row_activities(rows, x, act);
}

void lu_solve(const Matrix& LU, const std::vector<int>& ipiv, std::vector<double>& b) {
    const int n = LU.rows;
    for (int k = 0; k < n; ++k)
        if (ipiv[k] != k) std::swap(b[k], b[ipiv[k]]);
    for (int i = 1; i < n; ++i) {
        const double* ri = LU.row(i);
        double s = b[i];
        for (int j = 0; j < i; ++j) s -= ri[j] * b[j];
        b[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        const double* ri = LU.row(i);
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= ri[j] * b[j];
        b[i] = s / ri[i];
    }
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm_inf(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::fabs(v));
    return s;
}

}  // namespace wdn::linalg
