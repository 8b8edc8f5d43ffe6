#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hamflow/errors.hpp"
#include "hamflow/model.hpp"
#include "hamflow/operator.hpp"

using namespace hamflow;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const ModeSet> interval_modes(int k_max = 3, double cutoff = 9.5) {
    DomainSpec d;
    d.dim = 1;
    d.lengths = {kPi};
    d.boundary = Boundary::Dirichlet;
    d.period = 2.0 * kPi;
    d.m = 1;
    return std::make_shared<ModeSet>(enumerate_modes(d, k_max, cutoff));
}

Vector random_coeffs(std::mt19937_64& rng, Index n, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = scale * gauss(rng);
    return v;
}

HamiltonianModel saturating_model(double b = 0.5, double m2 = 0.3) {
    SaturatingParams p;
    p.m2 = m2;
    p.sign = -1;
    return HamiltonianModel::saturating(MatrixField::scalar(b, 1), p, 1.2);
}

} // namespace

TEST_CASE("grad_eval of the linear model is b*z + f coefficientwise") {
    auto ms = interval_modes();
    std::mt19937_64 rng(31);
    const Vector f = random_coeffs(rng, ms->total_dim);
    const Vector z = random_coeffs(rng, ms->total_dim);
    const double b = 0.7;
    HamiltonianModel model =
        HamiltonianModel::linear_forced(MatrixField::scalar(b, 1), SpectralField(ms, f), 0.8);
    const GridSpec grid = default_grid(*ms);
    const Vector g = grad_eval(model, *ms, z, grid);
    CHECK((g - (b * z + f)).norm() < 1e-12 * (1.0 + z.norm()));
}

TEST_CASE("grad_eval of the linear model is exactly affine") {
    auto ms = interval_modes();
    std::mt19937_64 rng(32);
    const Vector f = random_coeffs(rng, ms->total_dim);
    HamiltonianModel model =
        HamiltonianModel::linear_forced(MatrixField::scalar(0.4, 1), SpectralField(ms, f), 0.5);
    const GridSpec grid = default_grid(*ms);
    const Vector z1 = random_coeffs(rng, ms->total_dim);
    const Vector z2 = random_coeffs(rng, ms->total_dim);
    const double alpha = 1.7;
    const Vector lhs = grad_eval(model, *ms, Vector(alpha * z1 + z2), grid);
    const Vector rhs = alpha * grad_eval(model, *ms, z1, grid) +
                       grad_eval(model, *ms, z2, grid) - alpha * f;
    CHECK((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
}

TEST_CASE("saturating remainder vanishes at the origin") {
    auto ms = interval_modes();
    HamiltonianModel model = saturating_model();
    const GridSpec grid = default_grid(*ms);
    const Vector g = grad_eval(model, *ms, Vector(Vector::Zero(ms->total_dim)), grid);
    CHECK(g.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("sampled Lipschitz audit on grad_eval") {
    auto ms = interval_modes(2, 4.5);
    HamiltonianModel model = saturating_model();
    const GridSpec grid = default_grid(*ms);
    std::mt19937_64 rng(33);
    const Vector z = random_coeffs(rng, ms->total_dim);
    const Vector gz = grad_eval(model, *ms, z, grid);
    for (int i = 0; i < 100; ++i) {
        const Vector h = random_coeffs(rng, ms->total_dim, 1e-3);
        const Vector gzh = grad_eval(model, *ms, Vector(z + h), grid);
        CHECK((gzh - gz).norm() <= (model.lipschitz + 0.01) * h.norm());
    }
}

TEST_CASE("saturating sign property beyond K") {
    HamiltonianModel model = saturating_model();
    const double K = model.sat.k_radius();
    CHECK(K == doctest::Approx(0.99 / std::sqrt(1.0 - 0.99 * 0.99)).epsilon(1e-10));
    std::mt19937_64 rng(34);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Matrix B = model.B.sample(0);
    const Vector f0 = Vector::Zero(2);
    for (int i = 0; i < 200; ++i) {
        Vector z(2);
        z << gauss(rng), gauss(rng);
        z *= (K * (1.0 + 2.0 * std::abs(gauss(rng)))) / z.norm();
        const Vector r = model.remainder_point(z, B, f0);
        CHECK(model.sat.sign * r.dot(z) >= model.sat.certified_m2() * z.norm() - 1e-12);
        CHECK(r.norm() <= model.sat.m1() + 1e-12);
    }
}

TEST_CASE("audit_conditions: saturating and linear reports") {
    HamiltonianModel sat = saturating_model();
    const AuditReport rs = audit_conditions(sat, 500, 10.0, 1);
    CHECK(rs.lipschitz.applicable);
    CHECK(rs.lipschitz.pass);
    CHECK(rs.remainder_bound.pass);
    CHECK(rs.sign_condition.applicable);
    CHECK(rs.sign_condition.pass);
    CHECK(rs.all_pass());

    auto ms = interval_modes(1, 1.5);
    HamiltonianModel lin = HamiltonianModel::linear_forced(
        MatrixField::scalar(0.7, 1), SpectralField::zero(ms), 0.7);
    const AuditReport rl = audit_conditions(lin, 300, 5.0, 2);
    CHECK(rl.lipschitz.pass);
    // linear model: the ratio is exactly |b|
    CHECK(rl.lipschitz.worst_margin == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("audit_conditions: pinched model passes pinching and decay") {
    auto ms = interval_modes(1, 1.5);
    const SpectralField f = SpectralField::zero(ms);
    HamiltonianModel model = HamiltonianModel::pinched(MatrixField::scalar(1.1, 1),
                                                       MatrixField::scalar(1.3, 1), f, 1.45);
    const AuditReport r = audit_conditions(model, 500, 10.0, 3);
    CHECK(r.pinching.applicable);
    CHECK(r.pinching.pass);
    CHECK(r.pinching.worst_margin >= -1e-12);
    CHECK(r.decay.applicable);
    CHECK(r.decay.pass);
    CHECK(r.all_pass());
}

TEST_CASE("Lipschitz ratios stay below the declaration on 1e4 pairs per model") {
    auto ms = interval_modes(1, 1.5);
    std::vector<HamiltonianModel> shipped;
    shipped.push_back(saturating_model());
    shipped.push_back(HamiltonianModel::linear_forced(MatrixField::scalar(0.5, 1),
                                                      SpectralField::zero(ms), 0.5));
    shipped.push_back(HamiltonianModel::pinched(MatrixField::scalar(1.1, 1),
                                                MatrixField::scalar(1.3, 1),
                                                SpectralField::zero(ms), 1.45));
    for (std::size_t i = 0; i < shipped.size(); ++i) {
        const AuditReport r = audit_conditions(shipped[i], 10000, 50.0, 100 + i);
        CHECK(r.lipschitz.pass);
        CHECK(r.lipschitz.worst_margin > -0.01 * shipped[i].lipschitz);
    }
}

TEST_CASE("audit reports a violated declaration instead of throwing") {
    // declared Lipschitz below the true one: |grad H'| ratio reaches |b| = 0.9
    auto ms = interval_modes(1, 1.5);
    HamiltonianModel lying = HamiltonianModel::linear_forced(
        MatrixField::scalar(0.9, 1), SpectralField::zero(ms), 0.5);
    const AuditReport r = audit_conditions(lying, 300, 5.0, 4);
    CHECK(r.lipschitz.applicable);
    CHECK(!r.lipschitz.pass);
    CHECK(!r.all_pass());
}

TEST_CASE("residual: exact linear solve gives zero residual") {
    auto ms = interval_modes();
    std::mt19937_64 rng(35);
    const Vector f = random_coeffs(rng, ms->total_dim);
    HamiltonianModel model =
        HamiltonianModel::linear_forced(MatrixField::scalar(0.5, 1), SpectralField(ms, f), 0.6);
    const Vector z = solve_linear(*ms, Matrix(0.5 * Matrix::Identity(2, 2)), f, 0.0);
    const GridSpec grid = default_grid(*ms);
    CHECK(residual(model, *ms, z, 0.0, 1.0, grid) < 1e-12 * (1.0 + f.norm()));
}

TEST_CASE("residual: zero state of the unforced saturating model at lambda = 0") {
    auto ms = interval_modes();
    HamiltonianModel model = saturating_model();
    const GridSpec grid = default_grid(*ms);
    CHECK(residual(model, *ms, Vector(Vector::Zero(ms->total_dim)), 0.0, 0.0, grid) == 0.0);
}

TEST_CASE("residual grows linearly along a fixed perturbation direction") {
    auto ms = interval_modes(2, 4.5);
    HamiltonianModel model = saturating_model();
    const GridSpec grid = default_grid(*ms);
    std::mt19937_64 rng(36);
    Vector e = random_coeffs(rng, ms->total_dim);
    e /= e.norm();
    const Vector zero = Vector::Zero(ms->total_dim);
    // at z = 0 the residual vanishes, so residual(delta e) / delta approaches
    // the directional derivative norm; compare the slope at two small deltas
    const double r1 = residual(model, *ms, Vector(1e-5 * e), 0.0, 1.0, grid);
    const double r2 = residual(model, *ms, Vector(2e-5 * e), 0.0, 1.0, grid);
    CHECK(residual(model, *ms, zero, 0.0, 1.0, grid) == 0.0);
    CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("residual is continuous in (eps, lambda)") {
    auto ms = interval_modes(2, 4.5);
    HamiltonianModel model = saturating_model();
    const GridSpec grid = default_grid(*ms);
    std::mt19937_64 rng(37);
    const Vector z = random_coeffs(rng, ms->total_dim);

    // measure the lambda sensitivity, then verify the two-term bound
    double c_model = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double l1 = i / 10.0, l2 = (i + 1) / 10.0;
        const double d = std::abs(residual(model, *ms, z, 0.1, l2, grid) -
                                  residual(model, *ms, z, 0.1, l1, grid));
        c_model = std::max(c_model, d / (l2 - l1));
    }
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double e1 = 0.2 * uni(rng), e2 = 0.2 * uni(rng);
        const double l1 = uni(rng), l2 = uni(rng);
        const double lhs = std::abs(residual(model, *ms, z, e1, l1, grid) -
                                    residual(model, *ms, z, e2, l2, grid));
        CHECK(lhs <= z.norm() * std::abs(e1 - e2) + (c_model * 1.05 + 1e-9) * std::abs(l1 - l2) +
                         1e-9);
    }
}

TEST_CASE("model validation rejects bad declarations") {
    SaturatingParams p;
    p.m2 = -1.0;
    p.sign = -1;
    CHECK_THROWS_AS(HamiltonianModel::saturating(MatrixField::scalar(0.5, 1), p, 1.0),
                    ConfigError);
    CHECK_THROWS_AS(HamiltonianModel::pinched(MatrixField::scalar(1.3, 1),
                                              MatrixField::scalar(1.1, 1), SpectralField(), 1.0),
                    ConfigError);  // B1 <= B2 fails
}
