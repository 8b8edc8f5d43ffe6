#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "hamflow/errors.hpp"
#include "hamflow/homotopy.hpp"
#include "hamflow/operator.hpp"

using namespace hamflow;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const ModeSet> interval_modes(int k_max = 4, double cutoff = 16.5) {
    DomainSpec d;
    d.dim = 1;
    d.lengths = {kPi};
    d.boundary = Boundary::Dirichlet;
    d.period = 2.0 * kPi;
    d.m = 1;
    return std::make_shared<ModeSet>(enumerate_modes(d, k_max, cutoff));
}

HamiltonianModel saturating_model(double b = 0.5, double m2 = 0.3) {
    SaturatingParams p;
    p.m2 = m2;
    p.sign = -1;
    return HamiltonianModel::saturating(MatrixField::scalar(b, 1), p, 1.2);
}

SpectralField single_mode(const std::shared_ptr<const ModeSet>& ms, int k, TimeParity parity,
                          int n1, int comp, double amp) {
    Vector c = Vector::Zero(ms->total_dim);
    for (Index b = 0; b < static_cast<Index>(ms->blocks.size()); ++b) {
        const ModeBlock& blk = ms->blocks[static_cast<std::size_t>(b)];
        if (blk.k == k && blk.parity == parity && blk.n[0] == n1) {
            c[ms->block_offset(b) + comp] = amp;
            break;
        }
    }
    return SpectralField(ms, c);
}

} // namespace

TEST_CASE("regularized run with r = 0 stays on the zero branch") {
    auto ms = interval_modes();
    const WindowDecomposition w = build_window(*ms, 1.2);
    // linear model without forcing: remainder identically zero
    HamiltonianModel model = HamiltonianModel::linear_forced(MatrixField::scalar(0.5, 1),
                                                             SpectralField(), 0.6);
    ContinuationSchedule sched;
    sched.mode = HomotopyMode::Regularized;
    sched.eps0 = 0.05;
    sched.eps_levels = 3;
    sched.lambda_steps = 5;
    sched.compute_degree = false;
    const ContinuationTrace trace = run_homotopy(sched, model, w, *ms);
    for (const TracePoint& p : trace.points) {
        CHECK(p.norm < 1e-12);
        CHECK(p.residual < 1e-12);
        CHECK(p.step1_margin <= 1e-12);
    }
    CHECK(trace.final_hs_residual < 1e-12);
    for (double g : trace.cauchy_gaps) CHECK(g < 1e-12);
}

TEST_CASE("pinched run of a linear model follows the exact solve at every lambda") {
    auto ms = interval_modes();
    const WindowDecomposition w = build_window(*ms, 1.2);
    std::mt19937_64 rng(51);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector f(ms->total_dim);
    for (Index i = 0; i < f.size(); ++i) f[i] = gauss(rng);
    f *= 0.3 / f.norm();
    HamiltonianModel model =
        HamiltonianModel::linear_forced(MatrixField::scalar(0.5, 1), SpectralField(ms, f), 0.6);
    ContinuationSchedule sched;
    sched.mode = HomotopyMode::Pinched;
    sched.lambda_steps = 4;
    const ContinuationTrace trace = run_homotopy(sched, model, w, *ms);
    // Phi'_lambda = B z + lambda f, so the exact solution is (L - B)^{-1}(lambda f)
    const Vector exact = solve_linear(*ms, Matrix(0.5 * Matrix::Identity(2, 2)), f, 0.0);
    CHECK((trace.final_field.coeffs - exact).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(trace.final_hs_residual < 1e-10);
    CHECK(trace.gap_certificate == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("pinched run refuses a degenerate pinch certificate") {
    auto ms = interval_modes();
    const WindowDecomposition w = build_window(*ms, 1.2);
    // nu(B2) != 0: B2 = 1.0 I sits exactly on an eigenvalue of L
    HamiltonianModel model = HamiltonianModel::pinched(
        MatrixField::scalar(0.9, 1), MatrixField::scalar(1.0, 1), SpectralField(), 1.2);
    ContinuationSchedule sched;
    sched.mode = HomotopyMode::Pinched;
    CHECK_THROWS_AS(run_homotopy(sched, model, w, *ms), PreconditionError);
}

TEST_CASE("mode/model mismatch is rejected") {
    auto ms = interval_modes();
    const WindowDecomposition w = build_window(*ms, 1.2);
    HamiltonianModel sat = saturating_model();
    ContinuationSchedule sched;
    sched.mode = HomotopyMode::Pinched;
    CHECK_THROWS_AS(run_homotopy(sched, sat, w, *ms), PreconditionError);

    HamiltonianModel pin = HamiltonianModel::pinched(
        MatrixField::scalar(1.1, 1), MatrixField::scalar(1.3, 1), SpectralField(), 1.45);
    sched.mode = HomotopyMode::Regularized;
    sched.eps0 = 0.05;
    CHECK_THROWS_AS(run_homotopy(sched, pin, w, *ms), PreconditionError);
}

TEST_CASE("eps0 above the certified gap is rejected") {
    auto ms = interval_modes();
    const WindowDecomposition w = build_window(*ms, 1.2);
    HamiltonianModel model = saturating_model();
    ContinuationSchedule sched;
    sched.mode = HomotopyMode::Regularized;
    sched.eps0 = 0.11;  // delta/2 = 0.1
    CHECK_THROWS_AS(run_homotopy(sched, model, w, *ms), PreconditionError);
}

TEST_CASE("degree invariance along the regularized path") {
    auto ms = interval_modes();
    const WindowDecomposition w = build_window(*ms, 1.2);
    HamiltonianModel model = saturating_model();
    ContinuationSchedule sched;
    sched.mode = HomotopyMode::Regularized;
    sched.eps0 = 0.05;
    sched.eps_levels = 1;
    sched.lambda_steps = 4;
    sched.compute_degree = true;
    const ContinuationTrace trace = run_homotopy(sched, model, w, *ms);
    REQUIRE(trace.degrees.size() == 3);
    for (const auto& [lam, deg] : trace.degrees) CHECK(deg == 1);
}

TEST_CASE("step-2 map is the identity at lambda = 0") {
    auto ms = interval_modes();
    const WindowDecomposition w = build_window(*ms, 1.2);
    HamiltonianModel model = saturating_model();
    const MapFn map = make_step2_map(*ms, w, model, 0.05, 0.0);
    std::mt19937_64 rng(52);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector z0(w.inner_dim);
    for (Index i = 0; i < z0.size(); ++i) z0[i] = 3.0 * gauss(rng);
    CHECK((map(z0) - z0).norm() < 1e-12);
}

TEST_CASE("nontrivial regularized run: shifted saturating remainder") {
    // r(z) = -m2 (z - c)/sqrt(1+|z-c|^2) with c != 0 forces a nonzero branch;
    // acceptance-style checks by residual and monitor only
    auto ms = interval_modes();
    const WindowDecomposition w = build_window(*ms, 1.2);
    SaturatingParams p;
    p.m2 = 0.3;
    p.sign = -1;
    p.center = Vector(2);
    p.center << 0.4, -0.2;
    HamiltonianModel model =
        HamiltonianModel::saturating(MatrixField::scalar(0.5, 1), p, 1.2);
    ContinuationSchedule sched;
    sched.mode = HomotopyMode::Regularized;
    sched.eps0 = 0.05;
    sched.eps_levels = 5;
    sched.lambda_steps = 8;
    sched.compute_degree = false;
    const ContinuationTrace trace = run_homotopy(sched, model, w, *ms);
    CHECK(trace.points.back().norm > 0.1);  // genuinely nonzero branch
    for (const TracePoint& pt : trace.points) CHECK(pt.step1_margin <= 1e-9);
    // the eps -> 0 limit equation still carries an O(eps ||z||) defect
    const double eps_last = 0.05 * std::pow(0.5, 4);
    CHECK(trace.final_hs_residual <= 2.0 * eps_last * trace.points.back().norm + 1e-8);
    const MonitorReport mon = apriori_monitor(trace, model, HomotopyMode::Regularized);
    CHECK(mon.step1.pass);
    CHECK(mon.boundedness.pass);
    CHECK(mon.saturating_bound.pass);
}

TEST_CASE("apriori_monitor flags an injected runaway trace") {
    ContinuationTrace trace;
    trace.mode = HomotopyMode::Regularized;
    for (int i = 0; i < 20; ++i) {
        TracePoint p;
        p.eps = 0.05;
        p.lambda = 1.0;
        p.norm = i < 19 ? 1.0 : 1000.0;  // runaway last point
        p.residual = 0.0;
        p.step1_margin = -1.0;
        trace.points.push_back(p);
    }
    HamiltonianModel model = saturating_model();
    const MonitorReport report = apriori_monitor(trace, model, HomotopyMode::Regularized);
    CHECK(report.boundedness.applicable);
    CHECK(!report.boundedness.pass);
    CHECK(!report.all_pass());
}

TEST_CASE("apriori_monitor checks the cauchy trend") {
    ContinuationTrace trace;
    trace.mode = HomotopyMode::Regularized;
    TracePoint p;
    p.norm = 1.0;
    p.step1_margin = -1.0;
    trace.points.push_back(p);
    trace.cauchy_gaps = {0.5, 0.3, 0.2, 0.1};
    HamiltonianModel model = saturating_model();
    CHECK(apriori_monitor(trace, model, HomotopyMode::Regularized).cauchy_trend.pass);
    trace.cauchy_gaps = {0.5, 0.3, 0.2, 0.4};  // grows past 1.1x at the tail
    CHECK(!apriori_monitor(trace, model, HomotopyMode::Regularized).cauchy_trend.pass);
}

TEST_CASE("pinched monitor keeps the inner fraction above the floor") {
    auto ms = interval_modes();
    const WindowDecomposition w = build_window(*ms, 1.35);
    const SpectralField f = single_mode(ms, 0, TimeParity::Constant, 1, 0, 0.5);
    HamiltonianModel model = HamiltonianModel::pinched(MatrixField::scalar(1.15, 1),
                                                       MatrixField::scalar(1.25, 1), f, 1.32);
    ContinuationSchedule sched;
    sched.mode = HomotopyMode::Pinched;
    sched.lambda_steps = 6;
    const ContinuationTrace trace = run_homotopy(sched, model, w, *ms);
    const MonitorReport report = apriori_monitor(trace, model, HomotopyMode::Pinched);
    CHECK(report.inner_fraction.applicable);
    CHECK(report.inner_fraction.pass);
    CHECK(trace.final_hs_residual < 1e-8);
}
