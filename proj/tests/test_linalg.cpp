#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "wdn/linalg.hpp"

using namespace wdn::linalg;

namespace {

Matrix random_matrix(int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Matrix a(n, n);
    for (double& v : a.a) v = d(rng);
    for (int i = 0; i < n; ++i) a(i, i) += 2.0 * n;
    return a;
}

std::vector<double> random_vec(int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> x(n);
    for (double& v : x) v = d(rng);
    return x;
}

}  // namespace

TEST_CASE("matvec: openmp variant is bitwise identical to the serial reference") {
    for (int n : {1, 7, 64, 257}) {
        Matrix a = random_matrix(n, 11 + n);
        std::vector<double> x = random_vec(n, 23 + n), ys, yp;
        serial::matvec(a, x, ys);
        par::matvec(a, x, yp);
        REQUIRE(ys.size() == yp.size());
        for (size_t i = 0; i < ys.size(); ++i) CHECK(ys[i] == yp[i]);
    }
}

TEST_CASE("lu: factorizations agree bitwise and solve to high accuracy") {
    for (int n : {5, 96, 211}) {
        Matrix a = random_matrix(n, 5 + n);
        Matrix lus = a, lup = a;
        std::vector<int> ps, pp;
        REQUIRE(serial::lu_factor(lus, ps) == 0);
        REQUIRE(par::lu_factor(lup, pp) == 0);
        CHECK(ps == pp);
        for (size_t i = 0; i < lus.a.size(); ++i) CHECK(lus.a[i] == lup.a[i]);

        std::vector<double> xref = random_vec(n, 99 + n), b;
        serial::matvec(a, xref, b);
        lu_solve(lus, ps, b);
        double err = 0.0;
        for (int i = 0; i < n; ++i) err = std::max(err, std::fabs(b[i] - xref[i]));
        CHECK(err < 1e-9);
    }
}

TEST_CASE("lu: exact singularity is reported") {
    Matrix a(3, 3);  // column of zeros
    a(0, 0) = 1.0;
    a(1, 2) = 2.0;
    a(2, 0) = 3.0;
    std::vector<int> p;
    CHECK(serial::lu_factor(a, p) != 0);
}

TEST_CASE("row_activities: sparse rows, both backends") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    std::vector<SparseVec> rows(700);
    for (auto& r : rows) {
        int nnz = 1 + static_cast<int>(rng() % 5);
        for (int k = 0; k < nnz; ++k) r.emplace_back(static_cast<int>(rng() % 40), d(rng));
    }
    std::vector<double> x = random_vec(40, 17), as, ap;
    serial::row_activities(rows, x, as);
    par::row_activities(rows, x, ap);
    for (size_t i = 0; i < as.size(); ++i) CHECK(as[i] == ap[i]);
}

TEST_CASE("backend dispatch honors the default") {
    Backend saved = default_backend();
    set_default_backend(Backend::Serial);
    CHECK(default_backend() == Backend::Serial);
    set_default_backend(saved);
}
