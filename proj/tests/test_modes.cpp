#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hamflow/domain.hpp"
#include "hamflow/errors.hpp"
#include "hamflow/types.hpp"

using namespace hamflow;

namespace {

constexpr double kPi = std::numbers::pi;

DomainSpec interval(Boundary bc = Boundary::Dirichlet, int m = 1) {
    DomainSpec d;
    d.dim = 1;
    d.lengths = {kPi};
    d.boundary = bc;
    d.period = 2.0 * kPi;
    d.m = m;
    return d;
}

} // namespace

TEST_CASE("structure matrices: J^2 = -I, N^2 = I, JN + NJ = 0 exactly for m <= 4") {
    for (int m = 1; m <= 4; ++m) {
        const Matrix J = symplectic_matrix(m);
        const Matrix N = swap_matrix(m);
        const Matrix I = Matrix::Identity(2 * m, 2 * m);
        CHECK((J * J + I).cwiseAbs().maxCoeff() == 0.0);
        CHECK((N * N - I).cwiseAbs().maxCoeff() == 0.0);
        CHECK((J * N + N * J).cwiseAbs().maxCoeff() == 0.0);
        CHECK((J + J.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((N - N.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("enumerate_modes: interval Dirichlet counts") {
    // cutoff 1.5 keeps only n=1 (mu=1); k_max=0 keeps the constant time factor
    const ModeSet a = enumerate_modes(interval(), 0, 1.5);
    CHECK(a.blocks.size() == 1);
    CHECK(a.total_dim == 2);
    CHECK(a.blocks[0].parity == TimeParity::Constant);
    CHECK(a.blocks[0].mu == doctest::Approx(1.0).epsilon(1e-14));

    const ModeSet b = enumerate_modes(interval(), 1, 1.5);
    CHECK(b.blocks.size() == 3);  // (k=0) + (cos t, sin t), all times sin x
    CHECK(b.total_dim == 6);

    // components double the coefficient count
    const ModeSet c = enumerate_modes(interval(Boundary::Dirichlet, 2), 1, 1.5);
    CHECK(c.total_dim == 12);
}

TEST_CASE("enumerate_modes: Neumann admits the zero mode") {
    const ModeSet ms = enumerate_modes(interval(Boundary::Neumann), 0, 0.5);
    CHECK(ms.blocks.size() == 1);
    CHECK(ms.total_dim == 2);
    CHECK(ms.blocks[0].mu == 0.0);
    CHECK(ms.blocks[0].n[0] == 0);
}

TEST_CASE("enumerate_modes: empty set is a configuration error") {
    CHECK_THROWS_AS(enumerate_modes(interval(), 2, 0.5), ConfigError);
}

TEST_CASE("mode ordering is deterministic and keeps cos/sin pairs adjacent") {
    const ModeSet ms = enumerate_modes(interval(), 2, 10.0);
    const ModeSet again = enumerate_modes(interval(), 2, 10.0);
    REQUIRE(ms.blocks.size() == again.blocks.size());
    for (std::size_t i = 0; i < ms.blocks.size(); ++i) {
        CHECK(ms.blocks[i].k == again.blocks[i].k);
        CHECK(ms.blocks[i].n == again.blocks[i].n);
        CHECK(ms.blocks[i].parity == again.blocks[i].parity);
    }
    for (std::size_t i = 0; i + 1 < ms.blocks.size(); ++i) {
        if (ms.blocks[i].parity == TimeParity::Cos) {
            CHECK(ms.blocks[i + 1].parity == TimeParity::Sin);
            CHECK(ms.blocks[i + 1].k == ms.blocks[i].k);
            CHECK(ms.blocks[i + 1].n == ms.blocks[i].n);
        }
    }
    // groups tile the coefficient range
    Index next = 0;
    for (const ModeGroup& g : ms.groups) {
        CHECK(g.coeff_first == next);
        next += g.coeff_count;
    }
    CHECK(next == ms.total_dim);
}

TEST_CASE("mode_eigenvalues follows the closed formula") {
    ModeBlock b;
    b.k = 0;
    b.omega = 0.0;
    b.mu = 1.0;
    auto [p0, m0] = mode_eigenvalues(b);
    CHECK(p0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m0 == doctest::Approx(-1.0).epsilon(1e-15));

    b.k = 1;
    b.omega = 1.0;  // T = 2*pi
    auto [p1, m1] = mode_eigenvalues(b);
    CHECK(p1 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(m1 == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));

    b.k = 2;
    b.omega = 2.0;
    b.mu = 9.0;  // l = 3 on (0, pi)
    auto [p2, m2] = mode_eigenvalues(b);
    CHECK(p2 == doctest::Approx(std::sqrt(85.0)).epsilon(1e-15));
    CHECK(m2 == doctest::Approx(-std::sqrt(85.0)).epsilon(1e-15));
}

TEST_CASE("refine_one_level grows both cutoffs") {
    const ModeSet ms = enumerate_modes(interval(), 2, 4.5);  // l <= 2
    const ModeSet fine = refine_one_level(ms);
    CHECK(fine.k_max == 3);
    CHECK(fine.spatial_cutoff > 9.0);  // next shell l = 3 included
    CHECK(fine.max_spatial_index(0) == 3);
}

TEST_CASE("domain validation") {
    DomainSpec d = interval();
    d.period = 0.0;
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d = interval();
    d.lengths = {-1.0};
    CHECK_THROWS_AS(d.validate(), ConfigError);
    d = interval();
    d.m = 0;
    CHECK_THROWS_AS(d.validate(), ConfigError);
}
