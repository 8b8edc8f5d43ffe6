#include "hamflow/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hamflow/errors.hpp"
#include "hamflow/operator.hpp"

namespace hamflow {

namespace {

bool same_modeset(const ModeSet& a, const ModeSet& b) {
    return a.domain == b.domain && a.k_max == b.k_max &&
           a.spatial_cutoff == b.spatial_cutoff && a.total_dim == b.total_dim;
}

std::string fmt(Real v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::LinearForced: return "linear_forced";
        case ModelKind::Saturating: return "saturating";
        default: return "pinched";
    }
}

Real SaturatingParams::k_radius() const {
    const Real c = center.size() > 0 ? center.norm() : 0.0;
    const Real th2 = threshold * threshold;
    // positive root of (K - c)^2 = threshold^2 (1 + (K + c)^2); the margin
    // function (|z|-c)/sqrt(1+(|z|+c)^2) is increasing, so the sign condition
    // holds with constant threshold*m2 for all |z| >= K
    const Real a = 1.0 - th2;
    const Real b = -2.0 * c * (1.0 + th2);
    const Real q = c * c * a - th2;
    return (-b + std::sqrt(b * b - 4.0 * a * q)) / (2.0 * a);
}

void HamiltonianModel::validate() const {
    if (m < 1) throw ConfigError("hamiltonians", "model", "m must be >= 1");
    if (!(lipschitz > 0.0))
        throw ConfigError("hamiltonians", "model", "declared Lipschitz constant must be > 0");
    switch (kind) {
        case ModelKind::LinearForced:
            B.require_symmetric();
            break;
        case ModelKind::Saturating:
            B.require_symmetric();
            if (!(sat.m2 > 0.0))
                throw ConfigError("hamiltonians", "model", "saturating m2 must be > 0");
            if (sat.sign != 1 && sat.sign != -1)
                throw ConfigError("hamiltonians", "model", "saturating sign must be +1 or -1");
            if (!(sat.threshold > 0.0 && sat.threshold < 1.0))
                throw ConfigError("hamiltonians", "model", "saturation threshold must be in (0,1)");
            if (sat.center.size() != 0 && sat.center.size() != 2 * m)
                throw ConfigError("hamiltonians", "model", "saturating center must have 2m entries");
            break;
        case ModelKind::Pinched:
            B1.require_symmetric();
            B2.require_symmetric();
            if (!partial_order_leq(B1, B2))
                throw ConfigError("hamiltonians", "model", "pinched model needs B1 <= B2");
            if (!state_B)
                throw ConfigError("hamiltonians", "model", "pinched model needs a B(t,x,z) evaluator");
            break;
    }
}

HamiltonianModel HamiltonianModel::linear_forced(MatrixField B, SpectralField f, Real lipschitz) {
    HamiltonianModel mod;
    mod.kind = ModelKind::LinearForced;
    mod.m = B.m();
    mod.lipschitz = lipschitz;
    mod.B = std::move(B);
    mod.forcing = std::move(f);
    mod.validate();
    return mod;
}

HamiltonianModel HamiltonianModel::saturating(MatrixField B, SaturatingParams p, Real lipschitz) {
    HamiltonianModel mod;
    mod.kind = ModelKind::Saturating;
    mod.m = B.m();
    mod.lipschitz = lipschitz;
    mod.B = std::move(B);
    mod.sat = std::move(p);
    mod.validate();
    return mod;
}

HamiltonianModel HamiltonianModel::pinched(MatrixField B1, MatrixField B2, SpectralField f,
                                           Real lipschitz) {
    HamiltonianModel mod;
    mod.kind = ModelKind::Pinched;
    mod.m = B1.m();
    mod.lipschitz = lipschitz;
    mod.B1 = std::move(B1);
    mod.B2 = std::move(B2);
    mod.forcing = std::move(f);
    // interpolates from B2 at the origin to B1 asymptotically; s(|z|) in (0,1]
    mod.state_B = [b1 = mod.B1, b2 = mod.B2](Real, const Vector&, const Vector& z) {
        const Real s = 1.0 / (1.0 + z.squaredNorm());
        return Matrix(b1.sample(0) + s * (b2.sample(0) - b1.sample(0)));
    };
    mod.validate();
    return mod;
}

bool HamiltonianModel::admits_form(HomotopyForm form) const {
    if (form == HomotopyForm::Regularized)
        return kind == ModelKind::LinearForced || kind == ModelKind::Saturating;
    return kind == ModelKind::LinearForced || kind == ModelKind::Pinched;
}

const MatrixField& HamiltonianModel::reference_B(HomotopyForm form) const {
    if (form == HomotopyForm::Pinched && kind == ModelKind::Pinched) return B1;
    if (!admits_form(form))
        throw PreconditionError("hamiltonians", "reference_B",
                                to_string(kind) + " model does not admit this homotopy form");
    return B;
}

Vector HamiltonianModel::remainder_point(const Vector& z, const Matrix&,
                                         const VectorRef& fvalue) const {
    switch (kind) {
        case ModelKind::LinearForced:
        case ModelKind::Pinched:
            return fvalue;
        case ModelKind::Saturating: {
            Vector w = z;
            if (sat.center.size() > 0) w -= sat.center;
            Vector r = (sat.sign * sat.m2 / std::sqrt(1.0 + w.squaredNorm())) * w;
            if (forcing.empty()) return r;
            return r + fvalue;
        }
    }
    return fvalue;
}

Vector HamiltonianModel::grad_point(Real t, const Vector& x, const Vector& z,
                                    const Matrix& Bsample, const VectorRef& fvalue) const {
    if (kind == ModelKind::Pinched) return state_B(t, x, z) * z + fvalue;
    return Bsample * z + remainder_point(z, Bsample, fvalue);
}

Real HamiltonianModel::remainder_sup(const GridSpec& grid) const {
    Real fsup = 0.0;
    if (!forcing.empty()) {
        const Vector fvals = to_grid(*forcing.modes, forcing.coeffs, grid);
        const int comps = grid.domain.components();
        for (Index p = 0; p < grid.point_count(); ++p)
            fsup = std::max(fsup, fvals.segment(p * comps, comps).norm());
    }
    if (kind == ModelKind::Saturating) return sat.m1() + fsup;
    return fsup;
}

HomotopyForm natural_form(const HamiltonianModel& model) {
    return model.kind == ModelKind::Pinched ? HomotopyForm::Pinched : HomotopyForm::Regularized;
}

ModelGridContext make_context(const HamiltonianModel& model, const ModeSet& modes,
                              const GridSpec& grid, HomotopyForm form) {
    if (!model.admits_form(form))
        throw PreconditionError("hamiltonians", "make_context",
                                to_string(model.kind) + " model does not admit this homotopy form");
    ModelGridContext ctx;
    ctx.model = &model;
    ctx.modes = &modes;
    ctx.grid = grid;
    ctx.form = form;
    if (!model.forcing.empty()) {
        if (!same_modeset(*model.forcing.modes, modes))
            throw ConfigError("hamiltonians", "make_context",
                              "forcing field lives on a different mode set");
        ctx.forcing_values = to_grid(modes, model.forcing.coeffs, grid);
    } else {
        ctx.forcing_values = Vector::Zero(grid.value_count());
    }
    const MatrixField& bref = model.reference_B(form);
    ctx.bref = &bref;
    if (bref.kind() == MatrixField::Kind::Constant) {
        ctx.bref_constant = true;
        ctx.bref_const = bref.sample(0);
    } else {
        ctx.bref_constant = false;
        if (!(*bref.grid() == grid))
            throw ConfigError("hamiltonians", "make_context",
                              "sampled coefficient field lives on a different grid");
    }
    return ctx;
}

namespace {

template <class PointFn>
Vector map_points(const ModelGridContext& ctx, const VectorRef& state, PointFn&& fn) {
    const GridSpec& grid = ctx.grid;
    const int comps = grid.domain.components();
    if (state.size() != grid.value_count())
        throw ConfigError("hamiltonians", "grid_eval", "state vector does not match the grid");
    Vector out(grid.value_count());
    for (Index p = 0; p < grid.point_count(); ++p) {
        const Vector z = state.segment(p * comps, comps);
        const Vector f = ctx.forcing_values.segment(p * comps, comps);
        const Matrix& Bs = ctx.bref_constant ? ctx.bref_const : ctx.bref->sample(p);
        out.segment(p * comps, comps) = fn(p, z, Bs, f);
    }
    return out;
}

} // namespace

Vector grad_values(const ModelGridContext& ctx, const VectorRef& state_values) {
    return map_points(ctx, state_values,
                      [&](Index p, const Vector& z, const Matrix& Bs, const Vector& f) {
                          auto [t, flat] = ctx.grid.split_point(p);
                          return ctx.model->grad_point(ctx.grid.time_at(t),
                                                       ctx.grid.space_at(flat), z, Bs, f);
                      });
}

Vector rhs_values(const ModelGridContext& ctx, const VectorRef& state_values, Real lambda) {
    return map_points(ctx, state_values,
                      [&](Index p, const Vector& z, const Matrix& Bs, const Vector& f) {
                          auto [t, flat] = ctx.grid.split_point(p);
                          const Vector grad = ctx.model->grad_point(
                              ctx.grid.time_at(t), ctx.grid.space_at(flat), z, Bs, f);
                          return Vector((1.0 - lambda) * (Bs * z) + lambda * grad);
                      });
}

Vector remainder_values(const ModelGridContext& ctx, const VectorRef& state_values) {
    return map_points(ctx, state_values,
                      [&](Index, const Vector& z, const Matrix& Bs, const Vector& f) {
                          return ctx.model->remainder_point(z, Bs, f);
                      });
}

Vector grad_eval(const HamiltonianModel& model, const ModeSet& modes, const VectorRef& z,
                 const GridSpec& grid) {
    const ModelGridContext ctx = make_context(model, modes, grid, natural_form(model));
    return to_coeffs(modes, grad_values(ctx, to_grid(modes, z, grid)), grid);
}

SpectralField grad_eval(const HamiltonianModel& model, const SpectralField& z) {
    const GridSpec grid = default_grid(*z.modes);
    return SpectralField(z.modes, grad_eval(model, *z.modes, z.coeffs, grid));
}

Real residual(const HamiltonianModel& model, const ModeSet& modes, const VectorRef& z, Real eps,
              Real lambda, const GridSpec& grid) {
    const ModelGridContext ctx = make_context(model, modes, grid, natural_form(model));
    const Vector lhs = apply_shifted_L(modes, z, eps);
    const Vector rhs = to_coeffs(modes, rhs_values(ctx, to_grid(modes, z, grid), lambda), grid);
    return (lhs - rhs).norm();
}

Real residual(const HamiltonianModel& model, const SpectralField& z, Real eps, Real lambda) {
    return residual(model, *z.modes, z.coeffs, eps, lambda, default_grid(*z.modes));
}

namespace {

Real min_eig(const Matrix& A) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Vector random_direction(std::mt19937_64& rng, int dim) {
    std::normal_distribution<Real> gauss(0.0, 1.0);
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = gauss(rng);
    const Real n = v.norm();
    return n > 0 ? Vector(v / n) : Vector(Vector::Unit(dim, 0));
}

} // namespace

bool AuditReport::all_pass() const {
    for (const AuditCheck* c : {&lipschitz, &remainder_bound, &sign_condition, &pinching, &decay})
        if (c->applicable && !c->pass) return false;
    return true;
}

AuditReport audit_conditions(const HamiltonianModel& model, int sample_count, Real radius,
                             std::uint64_t seed) {
    if (sample_count < 1) sample_count = 1;
    model.validate();
    AuditReport report;
    report.samples = sample_count;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<Real> uni(0.0, 1.0);
    const int comps = 2 * model.m;

    // forcing samples give the (t,x) dependence of the remainder when present
    std::vector<Vector> fsamples;
    std::vector<std::pair<Real, Vector>> txsamples;
    if (!model.forcing.empty()) {
        const GridSpec grid = default_grid(*model.forcing.modes);
        const Vector fvals = to_grid(*model.forcing.modes, model.forcing.coeffs, grid);
        for (Index p = 0; p < grid.point_count(); ++p) {
            fsamples.push_back(fvals.segment(p * comps, comps));
            auto [t, flat] = grid.split_point(p);
            txsamples.emplace_back(grid.time_at(t), grid.space_at(flat));
        }
    } else {
        fsamples.push_back(Vector::Zero(comps));
        txsamples.emplace_back(0.0, Vector::Zero(1));
    }
    auto pick_point = [&](std::size_t i) { return i % fsamples.size(); };

    const MatrixField& Bfield = model.kind == ModelKind::Pinched ? model.B1 : model.B;
    auto bsample = [&](std::size_t i) -> const Matrix& {
        return Bfield.sample(static_cast<Index>(i) % Bfield.sample_count());
    };

    // structured radii around the saturation radius plus Monte-Carlo fill
    const Real K = model.kind == ModelKind::Saturating ? model.sat.k_radius() : 1.0;
    std::vector<Real> radii = {1e-3, 0.1, 1.0, 0.5 * K, K * 1.01, 2.0 * K, 10.0, 100.0, 1000.0};
    const Real rmax = std::max(radius, 1.0);
    for (int i = 0; i < sample_count; ++i)
        radii.push_back(rmax * std::pow(10.0, -4.0 * uni(rng)));

    // (H1) Lipschitz ratio
    {
        Real worst = 0.0;
        for (int i = 0; i < sample_count; ++i) {
            const std::size_t p = pick_point(static_cast<std::size_t>(i));
            const Real rz = radii[static_cast<std::size_t>(i) % radii.size()];
            const Vector z = rz * random_direction(rng, comps);
            const Real hs = std::pow(10.0, -6.0 + 6.0 * uni(rng));
            const Vector h = hs * random_direction(rng, comps);
            const Vector g1 = model.grad_point(txsamples[p].first, txsamples[p].second, z,
                                               bsample(p), fsamples[p]);
            const Vector g2 = model.grad_point(txsamples[p].first, txsamples[p].second, z + h,
                                               bsample(p), fsamples[p]);
            worst = std::max(worst, (g2 - g1).norm() / h.norm());
        }
        report.lipschitz.applicable = true;
        report.lipschitz.worst_margin = model.lipschitz - worst;
        report.lipschitz.pass = worst <= model.lipschitz * (1.0 + 1e-6);
        report.lipschitz.detail = "max ratio " + fmt(worst) + " vs declared " + fmt(model.lipschitz);
    }

    // remainder bound |r| <= M1
    if (model.kind == ModelKind::Saturating || model.kind == ModelKind::LinearForced) {
        Real fsup = 0.0;
        for (const Vector& f : fsamples) fsup = std::max(fsup, f.norm());
        const Real m1 = (model.kind == ModelKind::Saturating ? model.sat.m1() : 0.0) + fsup;
        Real worst = 0.0;
        for (int i = 0; i < sample_count; ++i) {
            const std::size_t p = pick_point(static_cast<std::size_t>(i));
            const Vector z =
                radii[static_cast<std::size_t>(i) % radii.size()] * random_direction(rng, comps);
            worst = std::max(worst, model.remainder_point(z, bsample(p), fsamples[p]).norm());
        }
        report.remainder_bound.applicable = true;
        report.remainder_bound.worst_margin = m1 - worst;
        report.remainder_bound.pass = worst <= m1 * (1.0 + 1e-9) + 1e-300;
        report.remainder_bound.detail = "max |r| " + fmt(worst) + " vs M1 " + fmt(m1);
    }

    // (H2+/-) sign condition beyond K
    if (model.kind == ModelKind::Saturating) {
        const Real m2c = model.sat.certified_m2();
        Real worst = std::numeric_limits<Real>::infinity();
        for (int i = 0; i < sample_count; ++i) {
            const std::size_t p = pick_point(static_cast<std::size_t>(i));
            const Real rz = K * (1.0 + 3.0 * uni(rng)) + (i % 4 == 0 ? 100.0 * uni(rng) : 0.0);
            const Vector z = rz * random_direction(rng, comps);
            const Vector r = model.remainder_point(z, bsample(p), fsamples[p]);
            worst = std::min(worst, model.sat.sign * r.dot(z) - m2c * z.norm());
        }
        report.sign_condition.applicable = true;
        report.sign_condition.worst_margin = worst;
        report.sign_condition.pass = worst >= -1e-9 * std::max(1.0, m2c * K);
        report.sign_condition.detail = "worst sign*(r,z) - M2|z| margin " + fmt(worst) +
                                       " beyond K=" + fmt(K);
    }

    // (H4) pinching B1 <= B(t,x,z) <= B2
    if (model.kind == ModelKind::Pinched) {
        Real worst = std::numeric_limits<Real>::infinity();
        for (int i = 0; i < sample_count; ++i) {
            const std::size_t p = pick_point(static_cast<std::size_t>(i));
            const Vector z =
                radii[static_cast<std::size_t>(i) % radii.size()] * random_direction(rng, comps);
            const Matrix Bz = model.state_B(txsamples[p].first, txsamples[p].second, z);
            const Index bp = static_cast<Index>(p) % model.B1.sample_count();
            const Index bq = static_cast<Index>(p) % model.B2.sample_count();
            worst = std::min(worst, min_eig(Bz - model.B1.sample(bp)));
            worst = std::min(worst, min_eig(model.B2.sample(bq) - Bz));
        }
        report.pinching.applicable = true;
        report.pinching.worst_margin = worst;
        report.pinching.pass = worst >= -1e-12;
        report.pinching.detail = "worst pinch eigenvalue margin " + fmt(worst);

        // (H3) remainder decay over shells |z| = 10, 100, 1000
        Real prev = std::numeric_limits<Real>::infinity();
        bool pass = true;
        std::string detail = "shell ratios";
        Real worst_ratio = 0.0;
        for (Real shell : {10.0, 100.0, 1000.0}) {
            Real ratio = 0.0;
            for (int i = 0; i < std::max(8, sample_count / 8); ++i) {
                const std::size_t p = pick_point(static_cast<std::size_t>(i));
                const Vector z = shell * random_direction(rng, comps);
                ratio = std::max(ratio,
                                 model.remainder_point(z, bsample(p), fsamples[p]).norm() / shell);
            }
            if (std::isfinite(prev) && ratio > 0.5 * prev + 1e-300) pass = false;
            detail += " " + fmt(ratio);
            worst_ratio = std::max(worst_ratio, ratio);
            prev = ratio;
        }
        report.decay.applicable = true;
        report.decay.pass = pass;
        report.decay.worst_margin = -worst_ratio;
        report.decay.detail = detail;
    }

    return report;
}

} // namespace hamflow
