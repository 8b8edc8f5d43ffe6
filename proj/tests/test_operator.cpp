#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hamflow/errors.hpp"
#include "hamflow/operator.hpp"

using namespace hamflow;

namespace {

constexpr double kPi = std::numbers::pi;

DomainSpec interval(int m = 1) {
    DomainSpec d;
    d.dim = 1;
    d.lengths = {kPi};
    d.boundary = Boundary::Dirichlet;
    d.period = 2.0 * kPi;
    d.m = m;
    return d;
}

} // namespace

TEST_CASE("k=0 block is mu*N") {
    const ModeSet ms = enumerate_modes(interval(), 0, 1.5);
    const Matrix L = assemble_truncated_L(ms);
    Matrix want(2, 2);
    want << 0, 1, 1, 0;
    CHECK((L - want).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(L);
    CHECK(es.eigenvalues()[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(es.eigenvalues()[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("k=1 pair diagonalizes to +/- sqrt(2) twice") {
    const ModeSet ms = enumerate_modes(interval(), 1, 1.5);
    const Matrix L = assemble_truncated_L(ms);
    REQUIRE(L.rows() == 6);
    // the 4x4 cos/sin pair sits after the k=0 block
    Eigen::SelfAdjointEigenSolver<Matrix> es(L.bottomRightCorner(4, 4));
    const double r2 = std::sqrt(2.0);
    CHECK(es.eigenvalues()[0] == doctest::Approx(-r2).epsilon(1e-14));
    CHECK(es.eigenvalues()[1] == doctest::Approx(-r2).epsilon(1e-14));
    CHECK(es.eigenvalues()[2] == doctest::Approx(r2).epsilon(1e-14));
    CHECK(es.eigenvalues()[3] == doctest::Approx(r2).epsilon(1e-14));
}

TEST_CASE("assembled operator is exactly symmetric and spectrum matches the formula") {
    for (int m : {1, 2}) {
        const ModeSet ms = enumerate_modes(interval(m), 8, 64.5);
        const Matrix L = assemble_truncated_L(ms);
        CHECK((L - L.transpose()).cwiseAbs().maxCoeff() == 0.0);

        Eigen::SelfAdjointEigenSolver<Matrix> es(L, Eigen::EigenvaluesOnly);
        std::vector<double> expected;
        for (const ModeBlock& b : ms.blocks) {
            const auto [lp, lm] = mode_eigenvalues(b);
            for (int i = 0; i < m; ++i) {
                expected.push_back(lp);
                expected.push_back(lm);
            }
        }
        std::sort(expected.begin(), expected.end());
        REQUIRE(static_cast<Index>(expected.size()) == L.rows());
        double dev = 0.0;
        for (Index i = 0; i < L.rows(); ++i)
            dev = std::max(dev, std::abs(es.eigenvalues()[i] - expected[i]));
        CHECK(dev < 1e-10);
    }
}

TEST_CASE("k=0 blocks carry m eigenvalues per sign (computed multiplicity)") {
    // The m=2 single-block case: eigenvalues +/- mu each twice, not 2m = 4.
    const ModeSet ms = enumerate_modes(interval(2), 0, 1.5);
    const Matrix L = assemble_truncated_L(ms);
    Eigen::SelfAdjointEigenSolver<Matrix> es(L, Eigen::EigenvaluesOnly);
    REQUIRE(L.rows() == 4);
    CHECK(es.eigenvalues()[0] == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()[1] == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()[2] == doctest::Approx(1.0));
    CHECK(es.eigenvalues()[3] == doctest::Approx(1.0));
}

TEST_CASE("solve_linear inverts a single mode diagonally") {
    const ModeSet ms = enumerate_modes(interval(), 1, 1.5);
    // basis mode with L-eigenvalue sqrt(2): build the eigenvector of the 4x4
    // pair by diagonalizing it, then check (L)^{-1} scales it by 1/sqrt(2)
    const Matrix L = assemble_truncated_L(ms);
    Eigen::SelfAdjointEigenSolver<Matrix> es(L.bottomRightCorner(4, 4));
    Vector f = Vector::Zero(ms.total_dim);
    f.tail(4) = es.eigenvectors().col(3);  // eigenvalue +sqrt(2)
    const Matrix B = Matrix::Zero(2, 2);
    const Vector z = solve_linear(ms, B, f, 0.0);
    CHECK((z - f / std::sqrt(2.0)).norm() < 1e-14);
}

TEST_CASE("solve_linear residual on random data, constant B") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int m : {1, 2}) {
        const ModeSet ms = enumerate_modes(interval(m), 4, 16.5);
        Vector f(ms.total_dim);
        for (Index i = 0; i < f.size(); ++i) f[i] = gauss(rng);
        const Matrix B = 0.5 * Matrix::Identity(2 * m, 2 * m);
        const Vector z = solve_linear(ms, B, f, 0.0);
        const Matrix op = assemble_truncated_L(ms) - assemble_constant_B(ms, B);
        CHECK((op * z - f).norm() / f.norm() < 1e-12);
        // left and right inverse
        const Vector zi = solve_linear(ms, B, Vector(op * z), 0.0);
        CHECK((zi - z).norm() / z.norm() < 1e-12);
    }
}

TEST_CASE("solve_linear names the singular block when B hits an eigenvalue") {
    const ModeSet ms = enumerate_modes(interval(), 4, 16.5);
    Vector f = Vector::Ones(ms.total_dim);
    const Matrix B = Matrix::Identity(2, 2);
    try {
        solve_linear(ms, B, f, 0.0);
        FAIL("expected SingularOperatorError");
    } catch (const SingularOperatorError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("k=0") != std::string::npos);
        CHECK(msg.find("mu=1") != std::string::npos);
    }
}

TEST_CASE("apply_shifted_L agrees with dense assembly") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const ModeSet ms = enumerate_modes(interval(), 3, 9.5);
    Vector z(ms.total_dim);
    for (Index i = 0; i < z.size(); ++i) z[i] = gauss(rng);
    const Matrix L = assemble_truncated_L(ms);
    const double eps = 0.25;
    const Vector want = L * z + eps * z;
    CHECK((apply_shifted_L(ms, z, eps) - want).norm() < 1e-12);
}
