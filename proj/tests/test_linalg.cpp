#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "coopreg/linalg.hpp"

using namespace coopreg;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = unif(rng);
    return m;
}

double max_real_eig(const MatrixXd& m) {
    Eigen::EigenSolver<MatrixXd> es(m, false);
    return es.eigenvalues().real().maxCoeff();
}

MatrixXd mat2(double a, double b, double c, double d) {
    MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

} // namespace

TEST_CASE("lyapunov scalar and diagonal cases") {
    MatrixXd a(1, 1), q(1, 1);
    a << -1.0;
    q << 2.0;
    const MatrixXd x = linalg::solve_lyapunov(a, q);
    CHECK(x(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

    const MatrixXd x2 = linalg::solve_lyapunov(-MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2));
    CHECK((x2 - 0.5 * MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lyapunov matches the hand-solved 2x2 instance") {
    const MatrixXd a = mat2(0, 1, -2, -3);
    const MatrixXd q = MatrixXd::Identity(2, 2);
    const MatrixXd x = linalg::solve_lyapunov(a, q);
    // Frozen from the 4x4 vectorized solve of a'X + Xa + I = 0.
    const MatrixXd expected = mat2(1.25, 0.25, 0.25, 0.25);
    CHECK((x - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.transpose() * x + x * a + q).norm() <= 1e-10 * (1.0 + q.norm()));
}

TEST_CASE("lyapunov rejects eigenvalue-sum degeneracies") {
    MatrixXd a(1, 1), q(1, 1);
    a << 0.0;
    q << 1.0;
    CHECK_THROWS_AS(linalg::solve_lyapunov(a, q), Error);

    // Purely imaginary spectrum: lambda_i + lambda_j = 0 occurs.
    const MatrixXd s = mat2(0, 1, -2, 0);
    CHECK_THROWS_AS(linalg::solve_lyapunov(s, MatrixXd::Identity(2, 2)), Error);
}

TEST_CASE("sylvester scalar and identity cases") {
    MatrixXd a(1, 1), b(1, 1), c(1, 1);
    a << 1.0;
    b << 1.0;
    c << 4.0;
    CHECK(linalg::solve_sylvester(a, b, c)(0, 0) == doctest::Approx(2.0).epsilon(1e-12));

    std::mt19937_64 rng(1);
    const MatrixXd c2 = random_matrix(rng, 3, 3);
    const MatrixXd x = linalg::solve_sylvester(MatrixXd::Zero(3, 3), MatrixXd::Identity(3, 3), c2);
    CHECK((x - c2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sylvester recovers a constructed solution") {
    std::mt19937_64 rng(42);
    MatrixXd a = random_matrix(rng, 3, 3);
    a -= (max_real_eig(a) + 1.0) * MatrixXd::Identity(3, 3);
    MatrixXd b = random_matrix(rng, 2, 2);
    b -= (max_real_eig(b) + 1.0) * MatrixXd::Identity(2, 2);
    const MatrixXd m = random_matrix(rng, 3, 2);
    const MatrixXd c = a * m + m * b;
    const MatrixXd x = linalg::solve_sylvester(a, b, c);
    CHECK((x - m).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("care reproduces the harmonic-generator solution") {
    const MatrixXd s = mat2(0, 1, -2, 0);
    const MatrixXd id = MatrixXd::Identity(2, 2);
    const MatrixXd p = linalg::solve_care({s, id, id, id});
    const MatrixXd p_ref = mat2(1.2739, -0.1623, -0.1623, 0.8057);
    CHECK((p - p_ref).cwiseAbs().maxCoeff() < 5e-4);
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    // Closed loop s - p must be Hurwitz.
    CHECK(linalg::is_hurwitz(s - p));
}

TEST_CASE("care scalar roots") {
    MatrixXd zero(1, 1), one(1, 1);
    zero << 0.0;
    one << 1.0;
    CHECK(linalg::solve_care({zero, one, one, one})(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    // a = 1: stabilizing root of p^2 - 2p - 1 = 0.
    const double p = linalg::solve_care({one, one, one, one})(0, 0);
    CHECK(p == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-9));
    CHECK(1.0 - p < 0.0);
}

TEST_CASE("care rejects unstabilizable pairs") {
    MatrixXd a(1, 1), b(1, 1), q(1, 1);
    a << 1.0;
    b << 0.0;
    q << 1.0;
    CHECK_THROWS_AS(linalg::solve_care({a, b, q, q}), Error);
}

TEST_CASE("care randomized: symmetry, residual, closed-loop certificate") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        std::uniform_int_distribution<int> n_dist(1, 4), m_dist(1, 2);
        const int n = n_dist(rng), m = m_dist(rng);
        const MatrixXd a = random_matrix(rng, n, n);
        const MatrixXd b = random_matrix(rng, n, m);
        if (!linalg::is_stabilizable(a, b)) continue;
        const MatrixXd q = MatrixXd::Identity(n, n);
        const MatrixXd r = MatrixXd::Identity(m, m);
        MatrixXd p;
        try {
            p = linalg::solve_care({a, b, q, r});
        } catch (const Error&) {
            continue; // borderline draw
        }
        CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        const MatrixXd resid = a.transpose() * p + p * a + q - p * b * b.transpose() * p;
        CHECK(resid.norm() <= 1e-9 * (1.0 + q.norm()));
        CHECK(linalg::is_hurwitz(a - b * b.transpose() * p));
    }
}

TEST_CASE("hurwitz examples") {
    CHECK(linalg::is_hurwitz(mat2(0, 1, -1, -1)));
    CHECK_FALSE(linalg::is_hurwitz(mat2(0, 1, -2, 0)));
    // s + l f with l = [0; 1.5], f = [0, -2]
    CHECK(linalg::is_hurwitz(mat2(0, 1, -2, -3)));
}

TEST_CASE("hurwitz agrees with eigenvalue signs on random matrices") {
    std::mt19937_64 rng(99);
    int tested = 0;
    while (tested < 100) {
        std::uniform_int_distribution<int> n_dist(1, 5);
        const int n = n_dist(rng);
        const MatrixXd a = random_matrix(rng, n, n);
        const double max_real = max_real_eig(a);
        if (std::abs(max_real) < 1e-6) continue;
        ++tested;
        CHECK(linalg::is_hurwitz(a) == (max_real < 0.0));
    }
}

TEST_CASE("characteristic polynomial examples") {
    const VectorXd c = linalg::char_poly(mat2(0, 1, -2, 0));
    REQUIRE(c.size() == 3);
    CHECK(c(0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c(1) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(c(2) == 1.0);

    MatrixXd zero1(1, 1);
    zero1 << 0.0;
    const VectorXd c1 = linalg::char_poly(zero1);
    CHECK(c1(0) == 0.0);
    CHECK(c1(1) == 1.0);

    const VectorXd c2 = linalg::char_poly(MatrixXd::Identity(2, 2));
    CHECK(c2(0) == doctest::Approx(1.0));
    CHECK(c2(1) == doctest::Approx(-2.0));
    CHECK(c2(2) == 1.0);
}

TEST_CASE("characteristic polynomial vanishes on the spectrum") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<int> n_dist(1, 4);
        const int n = n_dist(rng);
        const MatrixXd a = random_matrix(rng, n, n);
        const VectorXd coeffs = linalg::char_poly(a);
        Eigen::EigenSolver<MatrixXd> es(a, false);
        for (int k = 0; k < n; ++k) {
            const std::complex<double> lambda = es.eigenvalues()(k);
            std::complex<double> value = 0.0;
            std::complex<double> power = 1.0;
            for (int d = 0; d <= n; ++d) {
                value += coeffs(d) * power;
                power *= lambda;
            }
            CHECK(std::abs(value) < 1e-8);
        }
    }
}

TEST_CASE("stabilizing gain closes the loop") {
    MatrixXd a(1, 1), b(1, 1);
    a << 1.0;
    b << 1.0;
    const MatrixXd k = linalg::stabilizing_gain(a, b);
    CHECK(k(0, 0) == doctest::Approx(-(1.0 + std::sqrt(2.0))).epsilon(1e-9));
    CHECK((a + b * k)(0, 0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-9));

    // Zero input matrix is fine when the plant is already stable.
    const MatrixXd a2 = mat2(0, 1, -2, -3);
    const MatrixXd b2 = MatrixXd::Zero(2, 1);
    const MatrixXd k2 = linalg::stabilizing_gain(a2, b2);
    CHECK(k2.cwiseAbs().maxCoeff() == 0.0);
    CHECK(linalg::is_hurwitz(a2 + b2 * k2));
}

TEST_CASE("pbh tests") {
    // Integrator chain with force input: controllable.
    const MatrixXd a = mat2(0, 1, 0, 0);
    MatrixXd b(2, 1);
    b << 0, 2;
    CHECK(linalg::is_stabilizable(a, b));
    CHECK_FALSE(linalg::is_stabilizable(a, MatrixXd::Zero(2, 1)));

    MatrixXd f(1, 2);
    f << 0, -2;
    CHECK(linalg::is_detectable(mat2(0, 1, -2, 0), f));
    CHECK(linalg::is_observable(a, (MatrixXd(1, 2) << 1, 0).finished()));
    CHECK_FALSE(linalg::is_observable(a, MatrixXd::Zero(1, 2)));
}
