#include "hamflow/operator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "hamflow/errors.hpp"

namespace hamflow {

Matrix group_operator(const ModeGroup& g, int m, const MatrixRef& B, Real eps) {
    const int c = 2 * m;
    Matrix core = g.mu * swap_matrix(m) - B + eps * Matrix::Identity(c, c);
    if (g.block_count == 1) return core;
    Matrix J = symplectic_matrix(m);
    Matrix A = Matrix::Zero(2 * c, 2 * c);
    A.topLeftCorner(c, c) = core;
    A.bottomRightCorner(c, c) = core;
    A.topRightCorner(c, c) = g.omega * J;
    A.bottomLeftCorner(c, c) = -g.omega * J;
    return A;
}

Matrix assemble_truncated_L(const ModeSet& modes) {
    const int m = modes.domain.m;
    const Matrix Bzero = Matrix::Zero(2 * m, 2 * m);
    Matrix A = Matrix::Zero(modes.total_dim, modes.total_dim);
    for (const ModeGroup& g : modes.groups)
        A.block(g.coeff_first, g.coeff_first, g.coeff_count, g.coeff_count) =
            group_operator(g, m, Bzero, 0.0);
    return A;
}

Matrix assemble_constant_B(const ModeSet& modes, const MatrixRef& B) {
    const int c = modes.domain.components();
    Matrix E = Matrix::Zero(modes.total_dim, modes.total_dim);
    for (Index b = 0; b < static_cast<Index>(modes.blocks.size()); ++b)
        E.block(modes.block_offset(b), modes.block_offset(b), c, c) = B;
    return E;
}

Vector apply_shifted_L(const ModeSet& modes, const VectorRef& z, Real eps) {
    const int m = modes.domain.m;
    const Matrix Bzero = Matrix::Zero(2 * m, 2 * m);
    Vector out(modes.total_dim);
    for (const ModeGroup& g : modes.groups) {
        const Matrix A = group_operator(g, m, Bzero, eps);
        out.segment(g.coeff_first, g.coeff_count) =
            A * z.segment(g.coeff_first, g.coeff_count);
    }
    return out;
}

Vector solve_linear(const ModeSet& modes, const MatrixRef& B, const VectorRef& f, Real eps,
                    Real tol) {
    const int m = modes.domain.m;
    if (B.rows() != 2 * m || B.cols() != 2 * m)
        throw ConfigError("spectral_core", "solve_linear", "B must be 2m x 2m");
    if (f.size() != modes.total_dim)
        throw ConfigError("spectral_core", "solve_linear", "rhs length mismatch");
    Vector z(modes.total_dim);
    for (const ModeGroup& g : modes.groups) {
        const Matrix A = group_operator(g, m, B, eps);
        Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
        const Real min_abs = es.eigenvalues().cwiseAbs().minCoeff();
        if (min_abs <= tol) {
            const ModeBlock& blk = modes.blocks[static_cast<std::size_t>(g.block_first)];
            std::ostringstream msg;
            msg << "singular pencil eps*I + L - B: block k=" << g.k << ", n=(";
            for (std::size_t i = 0; i < blk.n.size(); ++i) msg << (i ? "," : "") << blk.n[i];
            msg << "), mu=" << g.mu << " has eigenvalue of magnitude " << min_abs;
            throw SingularOperatorError("spectral_core", "solve_linear", msg.str());
        }
        z.segment(g.coeff_first, g.coeff_count) =
            A.partialPivLu().solve(f.segment(g.coeff_first, g.coeff_count));
    }
    return z;
}

} // namespace hamflow
