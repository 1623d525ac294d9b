#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cnb/linalg.hpp"
#include "support/oracles.hpp"

using namespace cnb;

TEST_CASE("LU solve round-trips against multiplication") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 7;
        Matrix a(n, n);
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = u(rng);
            for (std::size_t j = 0; j < n; ++j) a(i, j) = u(rng);
        }
        const std::vector<double> b = a * x;
        const std::vector<double> xs = solve(a, b);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(xs[i] == Catch::Approx(x[i]).margin(1e-9));
    }
}

TEST_CASE("inverse gives A A^-1 = I") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix a(5, 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) a(i, j) = u(rng) + (i == j ? 3.0 : 0.0);
    const Matrix prod = a * inverse(a);
    const Matrix diff = prod - Matrix::identity(5);
    REQUIRE(diff.max_abs() < 1e-12);
}

TEST_CASE("jacobi_eigen diagonalizes known matrices") {
    SECTION("2x2") {
        Matrix a(2, 2);
        a(0, 0) = 2.0;
        a(1, 1) = 2.0;
        a(0, 1) = a(1, 0) = 1.0;
        const SymmetricEigen e = jacobi_eigen(a);
        REQUIRE(e.values[0] == Catch::Approx(1.0).margin(1e-13));
        REQUIRE(e.values[1] == Catch::Approx(3.0).margin(1e-13));
    }
    SECTION("diagonal input is returned sorted") {
        Matrix a(3, 3);
        a(0, 0) = 5.0;
        a(1, 1) = -1.0;
        a(2, 2) = 2.0;
        const SymmetricEigen e = jacobi_eigen(a);
        REQUIRE(e.values[0] == -1.0);
        REQUIRE(e.values[1] == 2.0);
        REQUIRE(e.values[2] == 5.0);
    }
}

TEST_CASE("jacobi_eigen satisfies A v = lambda v with orthonormal vectors") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n : {3u, 8u, 15u}) {
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                a(i, j) = u(rng);
                a(j, i) = a(i, j);
            }
        const SymmetricEigen e = jacobi_eigen(a);
        const double scale = a.max_abs();
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = e.vectors(i, k);
            const std::vector<double> av = a * v;
            for (std::size_t i = 0; i < n; ++i)
                REQUIRE(av[i] == Catch::Approx(e.values[k] * v[i]).margin(1e-12 * (1 + scale)));
        }
        const Matrix vtv = e.vectors.transposed() * e.vectors;
        REQUIRE((vtv - Matrix::identity(n)).max_abs() < 1e-12);
    }
}

TEST_CASE("jacobi eigenvalues agree with the generic eigensolve") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Matrix a(9, 9);
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = i; j < 9; ++j) {
            a(i, j) = u(rng);
            a(j, i) = a(i, j);
        }
    const SymmetricEigen e = jacobi_eigen(a);
    std::vector<double> generic;
    for (const auto& z : oracles::dgeev_eigenvalues(a)) {
        REQUIRE(std::abs(z.imag()) < 1e-10);
        generic.push_back(z.real());
    }
    REQUIRE(oracles::multiset_distance_real(e.values, generic) < 1e-10);
}

TEST_CASE("singular values of a skew matrix come in near pairs with one zero for odd n") {
    // 3x3 skew matrix has rank 2: singular values {0, s, s}.
    Matrix b(3, 3);
    b(0, 1) = 1.5;
    b(1, 0) = -1.5;
    b(0, 2) = -0.5;
    b(2, 0) = 0.5;
    b(1, 2) = 2.0;
    b(2, 1) = -2.0;
    const std::vector<double> s = singular_values(b);
    REQUIRE(s[0] < 1e-12);
    REQUIRE(s[1] == Catch::Approx(s[2]).epsilon(1e-12));
}
