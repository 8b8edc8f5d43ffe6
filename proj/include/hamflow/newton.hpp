#ifndef HAMFLOW_NEWTON_HPP
#define HAMFLOW_NEWTON_HPP

#include <functional>

#include "hamflow/types.hpp"

namespace hamflow {

using MapFn = std::function<Vector(const VectorRef&)>;

struct NewtonSettings {
    Real tol = 1e-10;       // accept when ||F|| < tol
    int max_iters = 50;
    int max_halvings = 20;  // damping: halve the step on residual increase
    Real fd_scale = 1e-6;   // central-difference step 1e-6*(1+||x||)
};

struct NewtonResult {
    Vector x;
    Real norm = 0.0;
    int iters = 0;
    bool converged = false;
};

/// Central finite-difference Jacobian (exact for affine maps).
Matrix fd_jacobian(const MapFn& F, const VectorRef& x, Real fd_scale = 1e-6);

/// Damped Newton with finite-difference Jacobians; no second derivatives
/// anywhere (the nonlinearities are only C^1).
NewtonResult newton_solve(const MapFn& F, const VectorRef& x0, const NewtonSettings& settings);

} // namespace hamflow

#endif
