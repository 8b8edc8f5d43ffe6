#ifndef HAMFLOW_REDUCTION_HPP
#define HAMFLOW_REDUCTION_HPP

#include <optional>
#include <vector>

#include "hamflow/model.hpp"
#include "hamflow/newton.hpp"
#include "hamflow/window.hpp"

namespace hamflow {

struct ReductionSettings {
    Real outer_tol = 1e-12;
    int outer_cap = 10000;
    Real newton_tol = 1e-10;
    int newton_cap = 50;
    int newton_halvings = 20;
    Real dedup_radius = 1e-6;
};

/// Converged state of the outer contraction at one (z0, eps, lambda).
struct ReducedPoint {
    Vector z0;       // inner coefficients
    Vector z_perp;   // outer coefficients
    Real eps = 0.0;
    Real lambda = 1.0;
    int outer_iterations = 0;
    Real outer_contraction_measured = 0.0;  // max successive-increment ratio above noise floor
};

/// Binds mode set, window, model and homotopy parameters for repeated
/// reduced-map evaluations (outer warm start cached across calls).
class ReducedProblem {
public:
    ReducedProblem(const ModeSet& modes, const WindowDecomposition& window,
                   const HamiltonianModel& model, HomotopyForm form, Real eps, Real lambda,
                   ReductionSettings settings, const GridSpec& grid);

    /// Outer fixed point z_perp = (L_eps^perp)^{-1} P^perp Phi'_lambda(z0+z_perp),
    /// iterated from the warm start (or zero). Throws DivergenceError when
    /// increments grow five times in a row, SolverError at the iteration cap.
    ReducedPoint solve_outer(const VectorRef& z0, const Vector* warm = nullptr) const;

    /// Reduced map a(z0) = (L + eps) z0 - P^0 Phi'_lambda(z0 + z_perp(z0));
    /// zeros correspond to solutions of the truncated homotopy equation.
    Vector reduced_map(const VectorRef& z0) const;

    /// Full coefficient vector from the two window components.
    Vector assemble_full(const VectorRef& z0, const VectorRef& z_perp) const;

    /// ||(eps I + L) z - Phi'_lambda(z)|| for the assembled point, computed
    /// independently of the iteration that produced it.
    Real full_residual(const VectorRef& z_full) const;

    const WindowDecomposition& window() const { return window_; }
    const ModeSet& modes() const { return modes_; }
    const ReductionSettings& settings() const { return settings_; }
    Real eps() const { return eps_; }
    Real lambda() const { return lambda_; }
    Real last_contraction() const { return last_contraction_; }
    Real peak_contraction() const { return peak_contraction_; }
    int last_outer_iterations() const { return last_outer_iterations_; }
    const Vector& warm_outer() const { return warm_outer_; }
    void set_warm_outer(Vector w) { warm_outer_ = std::move(w); }
    const GridSpec& grid() const { return grid_; }

    Vector rhs_coeffs(const VectorRef& z_full) const;  // Phi'_lambda projected

private:
    const ModeSet& modes_;
    WindowDecomposition window_;
    const HamiltonianModel& model_;
    HomotopyForm form_;
    Real eps_;
    Real lambda_;
    ReductionSettings settings_;
    GridSpec grid_;
    ModelGridContext ctx_;
    std::vector<Eigen::PartialPivLU<Matrix>> outer_lu_;  // per outer group
    std::vector<Matrix> inner_blocks_;                   // (L + eps) per inner group
    mutable Vector warm_outer_;
    mutable Real last_contraction_ = 0.0;
    mutable Real peak_contraction_ = 0.0;
    mutable int last_outer_iterations_ = 0;
};

/// Spec-surface wrapper: one outer solve at (z0, eps, lambda).
ReducedPoint outer_fixed_point(const ModeSet& modes, const WindowDecomposition& window,
                               const VectorRef& z0, Real eps, Real lambda,
                               const HamiltonianModel& model, Real tol);

/// Spec-surface wrapper: a(z0) at (eps, lambda).
Vector reduced_map(const ModeSet& modes, const WindowDecomposition& window, const VectorRef& z0,
                   Real eps, Real lambda, const HamiltonianModel& model,
                   const ReductionSettings& settings = {});

struct ReducedZero {
    Vector z0;
    int jacobian_sign = 0;
    Real reduced_norm = 0.0;
    Real full_residual = 0.0;
    ReducedPoint point;
};

/// Multistart damped Newton on the reduced map; returns de-duplicated regular
/// zeros with Jacobian determinant signs. inner_dim = 0 returns the pure outer
/// fixed point when its residual passes. Empty result when all starts fail.
std::vector<ReducedZero> solve_reduced(const ReducedProblem& problem,
                                       const std::vector<Vector>& starts);

} // namespace hamflow

#endif
