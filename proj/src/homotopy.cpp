#include "hamflow/homotopy.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "hamflow/errors.hpp"
#include "hamflow/index.hpp"
#include "hamflow/operator.hpp"

namespace hamflow {

std::string to_string(HomotopyMode m) {
    return m == HomotopyMode::Regularized ? "regularized" : "pinched";
}

std::vector<Real> ContinuationSchedule::eps_sequence() const {
    std::vector<Real> seq;
    Real e = eps0;
    for (int n = 0; n < eps_levels; ++n) {
        seq.push_back(e);
        e *= 0.5;
    }
    return seq;
}

Real ball_radius(const ContinuationSchedule& schedule, const HamiltonianModel& model,
                 const ModeSet& modes, Real eps) {
    const GridSpec grid = default_grid(modes);
    const Real measure = std::sqrt(modes.domain.space_time_measure());
    const Real r = schedule.ball_radius_factor * model.remainder_sup(grid) * measure / eps;
    return std::max(r, 1.0);
}

namespace {

// (eps I + L - B)^{-1}: blockwise for constant B, dense otherwise
class PencilSolver {
public:
    PencilSolver(const ModeSet& modes, const MatrixField& B, Real eps) : modes_(&modes) {
        if (B.kind() == MatrixField::Kind::Constant) {
            const int m = modes.domain.m;
            for (const ModeGroup& g : modes.groups)
                block_lu_.emplace_back(group_operator(g, m, B.sample(0), eps));
        } else {
            dense_lu_ = std::make_shared<Eigen::PartialPivLU<Matrix>>(
                Matrix(assemble_truncated_L(modes) - assemble_B(modes, B) +
                       eps * Matrix::Identity(modes.total_dim, modes.total_dim)));
        }
    }

    Vector solve(const VectorRef& f) const {
        if (dense_lu_) return dense_lu_->solve(f);
        Vector out(modes_->total_dim);
        for (std::size_t i = 0; i < modes_->groups.size(); ++i) {
            const ModeGroup& g = modes_->groups[i];
            out.segment(g.coeff_first, g.coeff_count) =
                block_lu_[i].solve(f.segment(g.coeff_first, g.coeff_count));
        }
        return out;
    }

private:
    const ModeSet* modes_;
    std::vector<Eigen::PartialPivLU<Matrix>> block_lu_;
    std::shared_ptr<Eigen::PartialPivLU<Matrix>> dense_lu_;
};

struct StepState {
    Vector z0;
    Vector z_perp;
};

struct EngineRun {
    const ContinuationSchedule& schedule;
    const HamiltonianModel& model;
    const WindowDecomposition& window;
    const ModeSet& modes;
    const EngineSettings& settings;
    HomotopyForm form;
    GridSpec grid;
    ModelGridContext ctx;
    ContinuationTrace trace;
    Real sqrt_measure;
    Real r_sup;
    Real pinched_bound = std::numeric_limits<Real>::infinity();
    std::mt19937_64 rng;

    EngineRun(const ContinuationSchedule& sch, const HamiltonianModel& mod,
              const WindowDecomposition& win, const ModeSet& ms, const EngineSettings& set)
        : schedule(sch),
          model(mod),
          window(win),
          modes(ms),
          settings(set),
          form(sch.mode == HomotopyMode::Regularized ? HomotopyForm::Regularized
                                                     : HomotopyForm::Pinched),
          grid(default_grid(ms)),
          ctx(make_context(mod, ms, grid, form)),
          rng(set.seed) {
        trace.mode = sch.mode;
        sqrt_measure = std::sqrt(ms.domain.space_time_measure());
        r_sup = mod.remainder_sup(grid);
    }

    Real remainder_norm(const VectorRef& z_full) const {
        return to_coeffs(modes, remainder_values(ctx, to_grid(modes, z_full, grid)), grid).norm();
    }

    Real inner_fraction(const VectorRef& z_full) const {
        const Real n = z_full.norm();
        if (n < 1e-300) return 0.0;
        return gather(z_full, window.inner_idx).norm() / n;
    }

    // one solve at (eps, lambda) from a warm state; nullopt when Newton fails
    std::optional<StepState> try_solve(Real eps, Real lambda, const StepState& warm,
                                       TracePoint& point) {
        ReducedProblem prob(modes, window, model, form, eps, lambda, settings.reduction, grid);
        prob.set_warm_outer(warm.z_perp);
        const Index d = window.inner_dim;

        Vector z0;
        int newton_iters = 0;
        if (d == 0) {
            z0 = Vector(0);
        } else {
            std::vector<Vector> starts;
            starts.push_back(warm.z0);
            if (warm.z0.norm() > 0) starts.push_back(Vector(Vector::Zero(d)));
            std::normal_distribution<Real> gauss(0.0, 1.0);
            for (int i = 0; i < settings.extra_starts; ++i) {
                Vector s(d);
                for (Index j = 0; j < d; ++j) s[j] = gauss(rng);
                starts.push_back(Vector((1.0 + warm.z0.norm()) * s));
            }
            NewtonSettings ns;
            ns.tol = settings.reduction.newton_tol;
            ns.max_iters = settings.reduction.newton_cap;
            ns.max_halvings = settings.reduction.newton_halvings;
            MapFn map = [&](const VectorRef& x) { return prob.reduced_map(x); };
            bool found = false;
            for (const Vector& s : starts) {
                const NewtonResult nr = newton_solve(map, s, ns);
                if (nr.converged) {
                    z0 = nr.x;
                    newton_iters = nr.iters;
                    found = true;
                    break;
                }
            }
            if (!found) return std::nullopt;
        }

        const ReducedPoint pt = prob.solve_outer(z0, &prob.warm_outer());
        const Vector full = prob.assemble_full(z0, pt.z_perp);
        const Real res = prob.full_residual(full);
        if (!(res < settings.residual_tol)) return std::nullopt;

        point.eps = eps;
        point.lambda = lambda;
        point.norm = full.norm();
        point.residual = res;
        point.inner_fraction = inner_fraction(full);
        point.contraction = prob.peak_contraction();
        point.outer_iterations = pt.outer_iterations;
        point.newton_iterations = newton_iters;
        trace.max_contraction = std::max(trace.max_contraction, prob.peak_contraction());

        // online monitors: the proofs' a priori bounds as runtime guards
        if (schedule.mode == HomotopyMode::Regularized) {
            const Real rnorm = remainder_norm(full);
            point.step1_margin = eps * point.norm - rnorm;
            if (point.step1_margin > 1e-9 * std::max(1.0, rnorm)) {
                std::ostringstream msg;
                msg << "a priori bound eps||z|| <= ||r(z)|| violated at (eps=" << eps
                    << ", lambda=" << lambda << "): margin " << point.step1_margin;
                throw MonitorError("homotopy_engine", "run_homotopy", msg.str());
            }
        } else {
            point.step1_margin = 0.0;
            if (point.norm > pinched_bound) {
                std::ostringstream msg;
                msg << "a priori solution bound exceeded at lambda=" << lambda << ": ||z||="
                    << point.norm << " > " << pinched_bound
                    << " (blow-up dichotomy monitor)";
                throw MonitorError("homotopy_engine", "run_homotopy", msg.str());
            }
        }
        StepState next;
        next.z0 = z0;
        next.z_perp = pt.z_perp;
        return next;
    }

    // move from lambda a (solved, in state) to b, bisecting on failure
    void advance_lambda(Real eps, Real a, Real b, int depth, StepState& state) {
        TracePoint point;
        if (auto next = try_solve(eps, b, state, point)) {
            trace.points.push_back(point);
            state = *next;
            return;
        }
        if (depth >= settings.max_step_halvings)
            throw SolverError("homotopy_engine", "run_homotopy",
                              "continuation failed at (eps=" + std::to_string(eps) +
                                  ", lambda=" + std::to_string(b) + ") after " +
                                  std::to_string(depth) + " step halvings");
        const Real mid = 0.5 * (a + b);
        advance_lambda(eps, a, mid, depth + 1, state);
        advance_lambda(eps, mid, b, depth + 1, state);
    }

    void advance_eps(Real from, Real to, int depth, StepState& state) {
        TracePoint point;
        if (auto next = try_solve(to, 1.0, state, point)) {
            trace.points.push_back(point);
            state = *next;
            return;
        }
        if (depth >= settings.max_step_halvings)
            throw SolverError("homotopy_engine", "run_homotopy",
                              "continuation failed marching eps to " + std::to_string(to) +
                                  " after " + std::to_string(depth) + " step halvings");
        const Real mid = 0.5 * (from + to);
        advance_eps(from, mid, depth + 1, state);
        advance_eps(mid, to, depth + 1, state);
    }
};

} // namespace

MapFn make_step2_map(const ModeSet& modes, const WindowDecomposition& window,
                     const HamiltonianModel& model, Real eps, Real lambda,
                     const ReductionSettings& settings) {
    const GridSpec grid = default_grid(modes);
    auto prob = std::make_shared<ReducedProblem>(modes, window, model,
                                                 HomotopyForm::Regularized, eps, lambda,
                                                 settings, grid);
    auto ctx = std::make_shared<ModelGridContext>(
        make_context(model, modes, grid, HomotopyForm::Regularized));
    auto solver = std::make_shared<PencilSolver>(modes, model.B, eps);
    const ModeSet* ms = &modes;
    return [prob, ctx, solver, ms, lambda, grid, window](const VectorRef& z0) {
        const ReducedPoint pt = prob->solve_outer(z0, &prob->warm_outer());
        const Vector full = prob->assemble_full(z0, pt.z_perp);
        const Vector r =
            to_coeffs(*ms, remainder_values(*ctx, to_grid(*ms, full, grid)), grid);
        const Vector y = solver->solve(lambda * r);
        return Vector(z0 - gather(y, window.inner_idx));
    };
}

ContinuationTrace run_homotopy(const ContinuationSchedule& schedule,
                               const HamiltonianModel& model, const WindowDecomposition& window,
                               const ModeSet& modes, const EngineSettings& settings) {
    model.validate();
    const HomotopyForm form = schedule.mode == HomotopyMode::Regularized
                                  ? HomotopyForm::Regularized
                                  : HomotopyForm::Pinched;
    if (!model.admits_form(form))
        throw PreconditionError("homotopy_engine", "run_homotopy",
                                "model class " + to_string(model.kind) +
                                    " does not match mode " + to_string(schedule.mode));
    if (schedule.lambda_steps < 1)
        throw PreconditionError("homotopy_engine", "run_homotopy", "lambda_steps must be >= 1");

    EngineRun run(schedule, model, window, modes, settings);

    if (schedule.mode == HomotopyMode::Regularized) {
        // certified gap below zero: sigma(L - B) avoids (-eps0_gap, 0) on the truncation
        const Matrix op = assemble_truncated_L(modes) - assemble_B(modes, model.B);
        Eigen::SelfAdjointEigenSolver<Matrix> es(op, Eigen::EigenvaluesOnly);
        Real eps0_gap = std::numeric_limits<Real>::infinity();
        for (Index i = 0; i < es.eigenvalues().size(); ++i)
            if (es.eigenvalues()[i] < -1e-12)
                eps0_gap = std::min(eps0_gap, -es.eigenvalues()[i]);
        run.trace.epsilon0 = eps0_gap;
        const Real cert = std::min(eps0_gap, window.delta);
        if (!(schedule.eps0 > 0.0) || !(schedule.eps0 < 0.5 * cert))
            throw PreconditionError(
                "homotopy_engine", "run_homotopy",
                "eps0=" + std::to_string(schedule.eps0) +
                    " must lie in (0, cert/2) with cert=min(eps0_gap, delta)=" +
                    std::to_string(cert));
        if (schedule.eps_levels < 1)
            throw PreconditionError("homotopy_engine", "run_homotopy", "eps_levels must be >= 1");

        const std::vector<Real> eps_seq = schedule.eps_sequence();
        StepState state;
        state.z0 = Vector::Zero(window.inner_dim);
        state.z_perp = Vector::Zero(static_cast<Index>(window.outer_idx.size()));

        // lambda sweep at the first regularization level
        const Real eps1 = eps_seq.front();
        {
            TracePoint point;
            if (auto next = run.try_solve(eps1, 0.0, state, point)) {
                run.trace.points.push_back(point);
                state = *next;
            } else {
                throw SolverError("homotopy_engine", "run_homotopy",
                                  "could not solve the linear start point (eps0, lambda=0)");
            }
            for (int i = 1; i <= schedule.lambda_steps; ++i) {
                const Real a = static_cast<Real>(i - 1) / schedule.lambda_steps;
                const Real b = static_cast<Real>(i) / schedule.lambda_steps;
                run.advance_lambda(eps1, a, b, 0, state);
            }
        }

        // degree chain at the first level
        if (schedule.compute_degree) {
            const Real radius = ball_radius(schedule, model, modes, eps1);
            for (Real lam : {0.0, 0.5, 1.0}) {
                DegreeSettings ds = settings.degree;
                ds.seed = settings.seed + 17;
                const MapFn map =
                    make_step2_map(modes, window, model, eps1, lam, settings.reduction);
                const int deg =
                    brouwer_degree(map, static_cast<int>(window.inner_dim), radius, ds);
                run.trace.degrees[lam] = deg;
                for (auto& p : run.trace.points)
                    if (p.eps == eps1 && p.lambda == lam) p.degree = deg;
            }
        }

        // march eps down at lambda = 1, recording the Cauchy gaps
        auto assemble = [&](const StepState& s) {
            Vector full = Vector::Zero(modes.total_dim);
            scatter_into(full, window.inner_idx, s.z0);
            scatter_into(full, window.outer_idx, s.z_perp);
            return full;
        };
        Vector prev_full = assemble(state);
        for (std::size_t n = 1; n < eps_seq.size(); ++n) {
            run.advance_eps(eps_seq[n - 1], eps_seq[n], 0, state);
            const Vector full = assemble(state);
            run.trace.cauchy_gaps.push_back((full - prev_full).norm());
            prev_full = full;
        }
        run.trace.final_field =
            SpectralField(std::make_shared<ModeSet>(modes), prev_full);
    } else {
        // pinched mode: certify the gap over [B1, B2] first; refuse otherwise
        const MatrixField& B1 = model.kind == ModelKind::Pinched ? model.B1 : model.B;
        const MatrixField& B2 = model.kind == ModelKind::Pinched ? model.B2 : model.B;
        std::vector<MatrixField> samples;
        const int nsamp = std::max(2, schedule.gap_segment_samples);
        for (int i = 0; i < nsamp; ++i) {
            const Real s = static_cast<Real>(i) / (nsamp - 1);
            samples.push_back(B1.linear_combination(1.0 - s, s, B2));
        }
        run.trace.gap_certificate = gap_radius(B1, B2, samples, modes);
        run.pinched_bound =
            2.0 * run.r_sup * run.sqrt_measure / run.trace.gap_certificate + 1e-9;

        StepState state;
        state.z0 = Vector::Zero(window.inner_dim);
        state.z_perp = Vector::Zero(static_cast<Index>(window.outer_idx.size()));
        TracePoint point;
        if (auto next = run.try_solve(0.0, 0.0, state, point)) {
            run.trace.points.push_back(point);
            state = *next;
        } else {
            throw SolverError("homotopy_engine", "run_homotopy",
                              "could not solve the linear start point (lambda=0)");
        }
        for (int i = 1; i <= schedule.lambda_steps; ++i) {
            const Real a = static_cast<Real>(i - 1) / schedule.lambda_steps;
            const Real b = static_cast<Real>(i) / schedule.lambda_steps;
            run.advance_lambda(0.0, a, b, 0, state);
        }
        Vector full = Vector::Zero(modes.total_dim);
        scatter_into(full, window.inner_idx, state.z0);
        scatter_into(full, window.outer_idx, state.z_perp);
        run.trace.final_field = SpectralField(std::make_shared<ModeSet>(modes), std::move(full));
    }

    run.trace.final_hs_residual =
        residual(model, modes, run.trace.final_field.coeffs, 0.0, 1.0, run.grid);
    return run.trace;
}

bool MonitorReport::all_pass() const {
    for (const MonitorCheck* c :
         {&step1, &boundedness, &saturating_bound, &inner_fraction, &cauchy_trend})
        if (c->applicable && !c->pass) return false;
    return true;
}

MonitorReport apriori_monitor(const ContinuationTrace& trace, const HamiltonianModel& model,
                              HomotopyMode mode, Real inner_fraction_floor) {
    MonitorReport report;
    if (trace.points.empty()) return report;

    std::vector<Real> norms;
    for (const TracePoint& p : trace.points) norms.push_back(p.norm);

    if (mode == HomotopyMode::Regularized) {
        Real worst = -std::numeric_limits<Real>::infinity();
        for (const TracePoint& p : trace.points) worst = std::max(worst, p.step1_margin);
        report.step1.applicable = true;
        report.step1.worst_margin = -worst;
        report.step1.pass = worst <= 1e-9;
        report.step1.detail = "max eps||z|| - ||r|| = " + std::to_string(worst);
    }

    {
        std::vector<Real> sorted = norms;
        std::sort(sorted.begin(), sorted.end());
        const Real median = sorted[sorted.size() / 2];
        const Real cap = 10.0 * std::max(median, 1e-12);
        const Real maxn = sorted.back();
        report.boundedness.applicable = true;
        report.boundedness.pass = maxn <= cap;
        report.boundedness.worst_margin = cap - maxn;
        report.boundedness.detail =
            "max ||z|| = " + std::to_string(maxn) + ", 10x median = " + std::to_string(cap);
    }

    if (mode == HomotopyMode::Regularized && model.kind == ModelKind::Saturating &&
        !trace.final_field.empty()) {
        const ModeSet& modes = *trace.final_field.modes;
        const Real bound =
            model.remainder_sup(default_grid(modes)) * std::sqrt(modes.domain.space_time_measure());
        Real worst = -std::numeric_limits<Real>::infinity();
        for (const TracePoint& p : trace.points)
            worst = std::max(worst, p.eps * p.norm - bound);
        report.saturating_bound.applicable = true;
        report.saturating_bound.pass = worst <= 1e-9 * std::max(1.0, bound);
        report.saturating_bound.worst_margin = -worst;
        report.saturating_bound.detail =
            "max eps||z|| - M1 sqrt(T|Omega|) = " + std::to_string(worst);
    }

    if (mode == HomotopyMode::Pinched) {
        const Real scale = *std::max_element(norms.begin(), norms.end());
        Real worst = std::numeric_limits<Real>::infinity();
        bool any = false;
        for (const TracePoint& p : trace.points)
            if (p.norm > 1e-8 * std::max(1.0, scale)) {
                worst = std::min(worst, p.inner_fraction);
                any = true;
            }
        report.inner_fraction.applicable = any;
        if (any) {
            report.inner_fraction.pass = worst >= inner_fraction_floor;
            report.inner_fraction.worst_margin = worst - inner_fraction_floor;
            report.inner_fraction.detail = "min inner fraction " + std::to_string(worst) +
                                           " vs floor " + std::to_string(inner_fraction_floor);
        }
    }

    if (trace.cauchy_gaps.size() >= 3) {
        bool pass = true;
        Real worst = -std::numeric_limits<Real>::infinity();
        for (std::size_t i = 2; i < trace.cauchy_gaps.size(); ++i) {
            const Real excess = trace.cauchy_gaps[i] - 1.1 * trace.cauchy_gaps[i - 1] - 1e-14;
            worst = std::max(worst, excess);
            if (excess > 0) pass = false;
        }
        report.cauchy_trend.applicable = true;
        report.cauchy_trend.pass = pass;
        report.cauchy_trend.worst_margin = -worst;
        report.cauchy_trend.detail = "max gap excess over 1.1x previous = " + std::to_string(worst);
    }

    return report;
}

} // namespace hamflow
