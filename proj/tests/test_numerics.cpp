#include <cmath>
#include <random>

#include "crane/numerics.hpp"
#include "doctest.h"

using namespace crane;
using namespace crane::num;

TEST_SUITE_BEGIN("numerics");

TEST_CASE("rk4 keeps a constant solution constant") {
    const Field zero = [](const Vec& x, double) { return Vec(x.size(), 0.0); };
    const Vec x0{1.0, -2.0, 3.0};
    CHECK(rk4_step(zero, x0, 0.0, 0.1) == x0);
}

TEST_CASE("rk4 single step on y' = y matches the closed form") {
    const Field f = [](const Vec& x, double) { return Vec{x[0]}; };
    const Vec y1 = rk4_step(f, {1.0}, 0.0, 0.1);
    CHECK(y1[0] == doctest::Approx(1.1051708333333333).epsilon(1e-14));
    CHECK(std::fabs(y1[0] - std::exp(0.1)) < 1e-7);
}

TEST_CASE("rk4 one-step error drops ~2^5 when halving dt") {
    const Field f = [](const Vec& x, double) { return Vec{x[0]}; };
    const double e1 = std::fabs(rk4_step(f, {1.0}, 0.0, 0.1)[0] - std::exp(0.1));
    const double e2 = std::fabs(rk4_step(f, {1.0}, 0.0, 0.05)[0] - std::exp(0.05));
    const double ratio = e1 / e2;
    CHECK(ratio > 20.0);
    CHECK(ratio < 45.0);
}

TEST_CASE("rk4 empirical global order on a smooth ODE is ~4") {
    const Field f = [](const Vec& x, double) { return Vec{x[0]}; };
    auto global_err = [&](double dt) {
        Vec y{1.0};
        const int n = static_cast<int>(std::lround(1.0 / dt));
        for (int i = 0; i < n; ++i) y = rk4_step(f, y, 0.0, dt);
        return std::fabs(y[0] - std::exp(1.0));
    };
    const double order = std::log2(global_err(0.02) / global_err(0.01));
    CHECK(order > 3.8);
    CHECK(order < 4.2);
}

TEST_CASE("integrate: zero field gives a constant trajectory on the full grid") {
    const Field zero = [](const Vec& x, double) { return Vec(x.size(), 0.0); };
    const auto traj = integrate(zero, {1.0, 2.0}, [](double) { return 0.0; }, 1.0, 0.1);
    CHECK(traj.size() == 11);
    CHECK(traj.states.front() == traj.states.back());
    CHECK(traj.times.back() == doctest::Approx(1.0));
}

TEST_CASE("integrate reports the failure time for a blowing-up field") {
    const Field bad = [](const Vec& x, double) { return Vec{x[0] * x[0] * 1e150}; };
    CHECK_THROWS_AS(integrate(bad, {1.0}, [](double) { return 0.0; }, 1.0, 0.1),
                    IntegrationError);
}

TEST_CASE("eigenvalues of a diagonal matrix") {
    Matrix m(4, 4);
    m(0, 0) = 1.0;
    m(1, 1) = 2.0;
    m(2, 2) = 3.0;
    m(3, 3) = 4.0;
    const auto ev = eigenvalues(m);
    CHECK(multiset_distance(ev, {1.0, 2.0, 3.0, 4.0}) < 1e-12);
}

TEST_CASE("eigenvalues of the companion matrix of s^2 + 1 are +-i") {
    Matrix m(2, 2, {0.0, -1.0, 1.0, 0.0});
    const auto ev = eigenvalues(m);
    CHECK(multiset_distance(ev, {Complex(0.0, 1.0), Complex(0.0, -1.0)}) < 1e-12);
}

TEST_CASE("eigenvalues of random matrices satisfy the characteristic polynomial") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + trial % 6;
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = unif(rng);
        const auto ev = eigenvalues(m);
        REQUIRE(ev.size() == n);
        const auto cp = characteristic_polynomial(m);
        for (const auto& l : ev) CHECK(std::abs(cp.eval(l)) < 1e-6 * (1.0 + std::pow(std::abs(l), double(n))));
    }
}

TEST_CASE("eigenvector residual is small for verification use") {
    Matrix m(4, 4, {0.0, 1.0, 0.0, 0.0,
                    0.0, 0.0, 1.0, 0.0,
                    0.0, 0.0, 0.0, 1.0,
                    -4.0, 0.0, -5.0, 0.0}); // companion of s^4 + 5 s^2 + 4 -> +-i, +-2i
    for (const auto& l : eigenvalues(m)) {
        const auto v = eigenvector(m, l);
        // ||(M - lambda I) v||
        double res = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            Complex acc = -l * v[i];
            for (std::size_t j = 0; j < 4; ++j) acc += m(i, j) * v[j];
            res += std::norm(acc);
        }
        CHECK(std::sqrt(res) < 1e-7);
    }
}

TEST_CASE("poly_from_roots expands the paper pole sets") {
    const auto p1 = poly_from_roots({{-1.0, 0.0}, {-2.0, 0.0}, {-2.0, 2.0}, {-2.0, -2.0}});
    REQUIRE(p1.coeffs.size() == 5);
    CHECK(p1.coeffs[0] == doctest::Approx(1.0));
    CHECK(p1.coeffs[1] == doctest::Approx(7.0));
    CHECK(p1.coeffs[2] == doctest::Approx(22.0));
    CHECK(p1.coeffs[3] == doctest::Approx(32.0));
    CHECK(p1.coeffs[4] == doctest::Approx(16.0));

    const auto p2 = poly_from_roots({{-4.0, 0.0}, {-8.0, 0.0}, {-8.0, 8.0}, {-8.0, -8.0}});
    REQUIRE(p2.coeffs.size() == 5);
    CHECK(p2.coeffs[1] == doctest::Approx(28.0));
    CHECK(p2.coeffs[2] == doctest::Approx(352.0));
    CHECK(p2.coeffs[3] == doctest::Approx(2048.0));
    CHECK(p2.coeffs[4] == doctest::Approx(4096.0));
}

TEST_CASE("poly_from_roots: double root at zero gives s^2") {
    const auto p = poly_from_roots({{0.0, 0.0}, {0.0, 0.0}});
    REQUIRE(p.coeffs.size() == 3);
    CHECK(p.coeffs[0] == 1.0);
    CHECK(p.coeffs[1] == 0.0);
    CHECK(p.coeffs[2] == 0.0);
}

TEST_CASE("poly_from_roots rejects an unpaired complex root") {
    CHECK_THROWS_AS(poly_from_roots({{-1.0, 1.0}, {-2.0, 0.0}}), DomainError);
}

TEST_CASE("roots of poly_from_roots round-trip through eigenvalues") {
    // companion-matrix refinement is identity on well-separated root sets
    const std::vector<Complex> roots{{-1.0, 0.0}, {-3.0, 0.0}, {-2.0, 5.0}, {-2.0, -5.0}};
    const auto p = poly_from_roots(roots);
    const std::size_t n = p.degree();
    Matrix companion(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) companion(i + 1, i) = 1.0;
    for (std::size_t i = 0; i < n; ++i) companion(i, n - 1) = -p.coeffs[n - i];
    CHECK(multiset_distance(eigenvalues(companion), roots) < 1e-8);
}

TEST_CASE("solve_lyapunov scalar cases") {
    {
        Matrix a(1, 1, {-1.0});
        Matrix q(1, 1, {2.0});
        const auto p = solve_lyapunov(a, q);
        CHECK(p(0, 0) == doctest::Approx(1.0));
    }
    {
        Matrix a(2, 2, {-1.0, 0.0, 0.0, -2.0});
        const auto p = solve_lyapunov(a, Matrix::identity(2));
        CHECK(p(0, 0) == doctest::Approx(0.5));
        CHECK(p(1, 1) == doctest::Approx(0.25));
        CHECK(p(0, 1) == doctest::Approx(0.0));
    }
}

TEST_CASE("solve_lyapunov: random Hurwitz systems have tiny residuals") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix a(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) a(i, j) = unif(rng);
        double max_re = -1e300;
        for (const auto& l : eigenvalues(a)) max_re = std::max(max_re, l.real());
        for (std::size_t i = 0; i < 4; ++i) a(i, i) -= max_re + 1.0;

        Matrix q(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i; j < 4; ++j) q(i, j) = q(j, i) = unif(rng);

        const auto p = solve_lyapunov(a, q);
        const Matrix residual = a.transpose() * p + p * a + q;
        CHECK(norm_inf(residual) < 1e-10);
        CHECK(norm_inf(p - p.transpose()) == 0.0);
    }
}

TEST_CASE("solve_lyapunov rejects a non-Hurwitz matrix naming the eigenvalue") {
    Matrix a(2, 2, {1.0, 0.0, 0.0, -1.0});
    CHECK_THROWS_WITH_AS(solve_lyapunov(a, Matrix::identity(2)),
                         doctest::Contains("not Hurwitz"), DomainError);
}

TEST_CASE("jacobian_fd recovers a linear map almost exactly") {
    Matrix m(3, 3, {1.0, 2.0, -1.0, 0.5, -3.0, 2.5, 4.0, 0.0, 1.0});
    const auto fn = [&m](const Vec& x) { return m * x; };
    const auto j = jacobian_fd(fn, {0.3, -0.7, 1.1}, 1e-5);
    CHECK(norm_inf(j - m) < 1e-9);
}

TEST_CASE("jacobian_fd error shrinks ~4x when halving eps") {
    const auto fn = [](const Vec& x) { return Vec{std::sin(x[0]) * std::exp(x[1])}; };
    const Vec x{0.4, -0.2};
    const double exact = std::cos(0.4) * std::exp(-0.2);
    const double e1 = std::fabs(jacobian_fd(fn, x, 1e-3)(0, 0) - exact);
    const double e2 = std::fabs(jacobian_fd(fn, x, 5e-4)(0, 0) - exact);
    CHECK(e1 / e2 > 3.0);
    CHECK(e1 / e2 < 5.0);
}

TEST_CASE("rank of simple matrices") {
    CHECK(rank(Matrix(3, 3)) == 0);
    CHECK(rank(Matrix::identity(5)) == 5);
    Matrix m(2, 2, {1.0, 2.0, 2.0, 4.0});
    CHECK(rank(m) == 1);
}

TEST_CASE("singular values of a diagonal matrix") {
    Matrix m(3, 3);
    m(0, 0) = 3.0;
    m(1, 1) = -2.0;
    m(2, 2) = 0.5;
    const auto sv = singular_values(m);
    CHECK(sv[0] == doctest::Approx(3.0));
    CHECK(sv[1] == doctest::Approx(2.0));
    CHECK(sv[2] == doctest::Approx(0.5));
}

TEST_CASE("characteristic polynomial via Faddeev-LeVerrier") {
    Matrix m(2, 2, {0.0, 1.0, -6.0, -5.0});
    const auto p = characteristic_polynomial(m); // s^2 + 5s + 6
    REQUIRE(p.coeffs.size() == 3);
    CHECK(p.coeffs[1] == doctest::Approx(5.0));
    CHECK(p.coeffs[2] == doctest::Approx(6.0));
}

TEST_SUITE_END();
