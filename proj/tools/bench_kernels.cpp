// Compares the serial reference kernels against the OpenMP variants on the
// sizes the interior-point solver actually produces (KKT systems of a few
// hundred rows). Correctness of the pairing is covered in tests/test_linalg;
// this target reports throughput.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "wdn/linalg.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace wdn::linalg;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

Matrix random_matrix(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Matrix a(n, n);
    for (double& v : a.a) v = d(rng);
    for (int i = 0; i < n; ++i) a(i, i) += n;  // keep it comfortably nonsingular
    return a;
}

template <class F>
double time_best_of(int reps, F f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        double t0 = now_s();
        f();
        best = std::min(best, now_s() - t0);
    }
    return best;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not compiled in; both columns run the serial path\n");
#endif
    std::printf("%-14s %6s %12s %12s %8s\n", "kernel", "n", "serial_ms", "openmp_ms", "speedup");

    std::mt19937_64 rng(7);
    for (int n : {128, 256, 384, 512, 768}) {
        Matrix a = random_matrix(n, rng);
        std::vector<double> x(n, 1.0), y;
        const int reps = 40000000 / (n * n) + 3;
        double ts = time_best_of(reps, [&] { serial::matvec(a, x, y); });
        double tp = time_best_of(reps, [&] { par::matvec(a, x, y); });
        std::printf("%-14s %6d %12.3f %12.3f %8.2f\n", "matvec", n, ts * 1e3, tp * 1e3, ts / tp);
    }
    for (int n : {128, 256, 384, 512}) {
        Matrix a = random_matrix(n, rng);
        std::vector<int> ipiv;
        const int reps = n >= 512 ? 3 : 6;
        double ts = time_best_of(reps, [&] {
            Matrix lu = a;
            serial::lu_factor(lu, ipiv);
        });
        double tp = time_best_of(reps, [&] {
            Matrix lu = a;
            par::lu_factor(lu, ipiv);
        });
        std::printf("%-14s %6d %12.3f %12.3f %8.2f\n", "lu_factor", n, ts * 1e3, tp * 1e3, ts / tp);
    }
    {
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        std::uniform_int_distribution<int> pick(0, 511);
        std::vector<SparseVec> rows(4096);
        for (auto& r : rows)
            for (int k = 0; k < 6; ++k) r.emplace_back(pick(rng), d(rng));
        std::vector<double> x(512, 0.5), act;
        double ts = time_best_of(2000, [&] { serial::row_activities(rows, x, act); });
        double tp = time_best_of(2000, [&] { par::row_activities(rows, x, act); });
        std::printf("%-14s %6d %12.3f %12.3f %8.2f\n", "row_activities", 4096, ts * 1e3, tp * 1e3,
                    ts / tp);
    }
    return 0;
}
