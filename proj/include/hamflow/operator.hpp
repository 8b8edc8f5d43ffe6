#ifndef HAMFLOW_OPERATOR_HPP
#define HAMFLOW_OPERATOR_HPP

#include "hamflow/domain.hpp"
#include "hamflow/types.hpp"

namespace hamflow {

/// Dense symmetric block for one invariant group of eps*I + L - B with
/// constant B (pass a zero matrix for B = 0):
///   k = 0:   mu*N - B + eps*I                       (2m x 2m)
///   k >= 1:  [[mu*N - B + eps*I,  omega*J],
///             [-omega*J,          mu*N - B + eps*I]] (4m x 4m)
Matrix group_operator(const ModeGroup& g, int m, const MatrixRef& B, Real eps);

/// Dense symmetric truncated L over the whole mode set, block diagonal over
/// groups; its spectrum is the multiset of +/- sqrt(omega_k^2 + mu^2) with
/// multiplicity m per sign per scalar block.
Matrix assemble_truncated_L(const ModeSet& modes);

/// Dense embedding of pointwise multiplication by a constant symmetric
/// 2m x 2m matrix B (block diagonal, B repeated on every scalar block).
Matrix assemble_constant_B(const ModeSet& modes, const MatrixRef& B);

/// (eps*I + L) z, blockwise.
Vector apply_shifted_L(const ModeSet& modes, const VectorRef& z, Real eps = 0.0);

/// Solve (eps*I + L - B) z = f exactly on the truncated space, blockwise.
/// Throws SingularOperatorError naming the offending block when some block of
/// the pencil has an eigenvalue of magnitude <= tol.
Vector solve_linear(const ModeSet& modes, const MatrixRef& B, const VectorRef& f, Real eps,
                    Real tol = 1e-12);

} // namespace hamflow

#endif
