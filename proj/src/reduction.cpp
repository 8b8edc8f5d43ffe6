#include "hamflow/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hamflow/errors.hpp"
#include "hamflow/operator.hpp"

namespace hamflow {

ReducedProblem::ReducedProblem(const ModeSet& modes, const WindowDecomposition& window,
                               const HamiltonianModel& model, HomotopyForm form, Real eps,
                               Real lambda, ReductionSettings settings, const GridSpec& grid)
    : modes_(modes),
      window_(window),
      model_(model),
      form_(form),
      eps_(eps),
      lambda_(lambda),
      settings_(settings),
      grid_(grid),
      ctx_(make_context(model, modes, grid, form)) {
    if (!(eps >= 0.0) || !(eps < 0.5 * window.delta))
        throw PreconditionError("reduction_solver", "outer_fixed_point",
                                "eps=" + std::to_string(eps) +
                                    " outside [0, delta/2) with delta=" +
                                    std::to_string(window.delta));
    if (model.lipschitz > window.l_h)
        throw PreconditionError("reduction_solver", "outer_fixed_point",
                                "model declares l_H=" + std::to_string(model.lipschitz) +
                                    " above the window half-width " + std::to_string(window.l_h));
    const int m = modes.domain.m;
    const Matrix Bzero = Matrix::Zero(2 * m, 2 * m);
    for (Index gi : window_.outer_groups) {
        const ModeGroup& g = modes.groups[static_cast<std::size_t>(gi)];
        outer_lu_.emplace_back(group_operator(g, m, Bzero, eps));
    }
    for (Index gi : window_.inner_groups) {
        const ModeGroup& g = modes.groups[static_cast<std::size_t>(gi)];
        inner_blocks_.push_back(group_operator(g, m, Bzero, eps));
    }
    warm_outer_ = Vector::Zero(static_cast<Index>(window_.outer_idx.size()));
}

Vector ReducedProblem::assemble_full(const VectorRef& z0, const VectorRef& z_perp) const {
    Vector full = Vector::Zero(modes_.total_dim);
    scatter_into(full, window_.inner_idx, z0);
    scatter_into(full, window_.outer_idx, z_perp);
    return full;
}

Vector ReducedProblem::rhs_coeffs(const VectorRef& z_full) const {
    return to_coeffs(modes_, rhs_values(ctx_, to_grid(modes_, z_full, grid_), lambda_), grid_);
}

Real ReducedProblem::full_residual(const VectorRef& z_full) const {
    return (apply_shifted_L(modes_, z_full, eps_) - rhs_coeffs(z_full)).norm();
}

ReducedPoint ReducedProblem::solve_outer(const VectorRef& z0, const Vector* warm) const {
    const Index nouter = static_cast<Index>(window_.outer_idx.size());
    Vector z_perp = warm ? *warm : Vector(Vector::Zero(nouter));
    if (z_perp.size() != nouter)
        throw PreconditionError("reduction_solver", "outer_fixed_point",
                                "warm start has wrong outer dimension");

    Real prev_inc = -1.0;
    Real contraction = 0.0;
    int growth_streak = 0;
    std::vector<Real> recent_ratios;
    int iter = 0;
    for (; iter < settings_.outer_cap; ++iter) {
        const Vector full = assemble_full(z0, z_perp);
        const Vector rhs = rhs_coeffs(full);
        Vector next(nouter);
        Index off = 0;
        for (std::size_t i = 0; i < window_.outer_groups.size(); ++i) {
            const ModeGroup& g =
                modes_.groups[static_cast<std::size_t>(window_.outer_groups[i])];
            next.segment(off, g.coeff_count) =
                outer_lu_[i].solve(rhs.segment(g.coeff_first, g.coeff_count));
            off += g.coeff_count;
        }
        const Real inc = (next - z_perp).norm();
        const Real floor =
            std::max(10.0 * settings_.outer_tol, 1e-13 * (1.0 + z_perp.norm()));
        if (prev_inc > floor) {
            const Real ratio = inc / prev_inc;
            contraction = std::max(contraction, ratio);
            recent_ratios.push_back(ratio);
            if (recent_ratios.size() > 8) recent_ratios.erase(recent_ratios.begin());
            growth_streak = ratio > 1.0 ? growth_streak + 1 : 0;
            if (growth_streak >= 5) {
                std::ostringstream msg;
                msg << "outer iteration diverged, last increment ratios:";
                for (Real r : recent_ratios) msg << ' ' << r;
                throw DivergenceError("reduction_solver", "outer_fixed_point", msg.str());
            }
        }
        z_perp = next;
        if (inc < settings_.outer_tol) {
            ++iter;
            break;
        }
        prev_inc = inc;
    }
    if (iter >= settings_.outer_cap)
        throw SolverError("reduction_solver", "outer_fixed_point",
                          "iteration cap " + std::to_string(settings_.outer_cap) +
                              " exceeded without contraction to tol");
    warm_outer_ = z_perp;
    last_contraction_ = contraction;
    peak_contraction_ = std::max(peak_contraction_, contraction);
    last_outer_iterations_ = iter;

    ReducedPoint pt;
    pt.z0 = z0;
    pt.z_perp = std::move(z_perp);
    pt.eps = eps_;
    pt.lambda = lambda_;
    pt.outer_iterations = iter;
    pt.outer_contraction_measured = contraction;
    return pt;
}

Vector ReducedProblem::reduced_map(const VectorRef& z0) const {
    const ReducedPoint pt = solve_outer(z0, &warm_outer_);
    const Vector full = assemble_full(z0, pt.z_perp);
    const Vector rhs = rhs_coeffs(full);
    Vector a(window_.inner_dim);
    Index off = 0;
    for (std::size_t i = 0; i < window_.inner_groups.size(); ++i) {
        const ModeGroup& g = modes_.groups[static_cast<std::size_t>(window_.inner_groups[i])];
        a.segment(off, g.coeff_count) =
            inner_blocks_[i] * z0.segment(off, g.coeff_count) -
            rhs.segment(g.coeff_first, g.coeff_count);
        off += g.coeff_count;
    }
    return a;
}

ReducedPoint outer_fixed_point(const ModeSet& modes, const WindowDecomposition& window,
                               const VectorRef& z0, Real eps, Real lambda,
                               const HamiltonianModel& model, Real tol) {
    ReductionSettings settings;
    settings.outer_tol = tol;
    ReducedProblem problem(modes, window, model, natural_form(model), eps, lambda, settings,
                           default_grid(modes));
    return problem.solve_outer(z0);
}

Vector reduced_map(const ModeSet& modes, const WindowDecomposition& window, const VectorRef& z0,
                   Real eps, Real lambda, const HamiltonianModel& model,
                   const ReductionSettings& settings) {
    ReducedProblem problem(modes, window, model, natural_form(model), eps, lambda, settings,
                           default_grid(modes));
    return problem.reduced_map(z0);
}

std::vector<ReducedZero> solve_reduced(const ReducedProblem& problem,
                                       const std::vector<Vector>& starts) {
    const ReductionSettings& s = problem.settings();
    std::vector<ReducedZero> zeros;
    const Index d = problem.window().inner_dim;

    if (d == 0) {
        const ReducedPoint pt = problem.solve_outer(Vector(0));
        const Real res = problem.full_residual(problem.assemble_full(Vector(0), pt.z_perp));
        if (res < std::max(s.newton_tol, 10.0 * s.outer_tol)) {
            ReducedZero z;
            z.z0 = Vector(0);
            z.jacobian_sign = 1;
            z.reduced_norm = 0.0;
            z.full_residual = res;
            z.point = pt;
            zeros.push_back(std::move(z));
        }
        return zeros;
    }

    MapFn map = [&](const VectorRef& z0) { return problem.reduced_map(z0); };
    NewtonSettings ns;
    ns.tol = s.newton_tol;
    ns.max_iters = s.newton_cap;
    ns.max_halvings = s.newton_halvings;

    for (const Vector& start : starts) {
        if (start.size() != d)
            throw PreconditionError("reduction_solver", "solve_reduced",
                                    "start has wrong inner dimension");
        const NewtonResult nr = newton_solve(map, start, ns);
        if (!nr.converged) continue;
        bool duplicate = false;
        for (const ReducedZero& z : zeros)
            if ((z.z0 - nr.x).norm() <= s.dedup_radius) {
                duplicate = true;
                break;
            }
        if (duplicate) continue;
        ReducedZero z;
        z.z0 = nr.x;
        z.reduced_norm = nr.norm;
        const Matrix J = fd_jacobian(map, nr.x, ns.fd_scale);
        const Real det = J.partialPivLu().determinant();
        z.jacobian_sign = det > 0 ? 1 : (det < 0 ? -1 : 0);
        z.point = problem.solve_outer(nr.x, &problem.warm_outer());
        z.full_residual = problem.full_residual(problem.assemble_full(nr.x, z.point.z_perp));
        zeros.push_back(std::move(z));
    }
    std::sort(zeros.begin(), zeros.end(), [](const ReducedZero& a, const ReducedZero& b) {
        const Real na = a.z0.norm(), nb = b.z0.norm();
        if (na != nb) return na < nb;
        return std::lexicographical_compare(a.z0.data(), a.z0.data() + a.z0.size(), b.z0.data(),
                                            b.z0.data() + b.z0.size());
    });
    return zeros;
}

} // namespace hamflow
