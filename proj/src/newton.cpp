#include "hamflow/newton.hpp"

#include <Eigen/LU>
#include <cmath>

namespace hamflow {

Matrix fd_jacobian(const MapFn& F, const VectorRef& x, Real fd_scale) {
    const Index d = x.size();
    const Real h = fd_scale * (1.0 + x.norm());
    Matrix J(d, d);
    Vector xp = x, xm = x;
    for (Index j = 0; j < d; ++j) {
        xp[j] += h;
        xm[j] -= h;
        J.col(j) = (F(xp) - F(xm)) / (2.0 * h);
        xp[j] = x[j];
        xm[j] = x[j];
    }
    return J;
}

NewtonResult newton_solve(const MapFn& F, const VectorRef& x0, const NewtonSettings& s) {
    NewtonResult res;
    res.x = x0;
    if (x0.size() == 0) {
        res.converged = true;
        return res;
    }
    Vector fx = F(res.x);
    res.norm = fx.norm();
    for (res.iters = 0; res.iters < s.max_iters; ++res.iters) {
        if (res.norm < s.tol) {
            res.converged = true;
            return res;
        }
        const Matrix J = fd_jacobian(F, res.x, s.fd_scale);
        Vector step = J.partialPivLu().solve(-fx);
        if (!step.allFinite()) return res;
        Real alpha = 1.0;
        bool improved = false;
        for (int h = 0; h <= s.max_halvings; ++h) {
            const Vector trial = res.x + alpha * step;
            const Vector ft = F(trial);
            const Real nt = ft.norm();
            if (std::isfinite(nt) && nt < res.norm) {
                res.x = trial;
                fx = ft;
                res.norm = nt;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) return res;
    }
    res.converged = res.norm < s.tol;
    return res;
}

} // namespace hamflow
