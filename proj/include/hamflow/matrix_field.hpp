#ifndef HAMFLOW_MATRIX_FIELD_HPP
#define HAMFLOW_MATRIX_FIELD_HPP

#include <functional>
#include <memory>
#include <vector>

#include "hamflow/grid.hpp"
#include "hamflow/types.hpp"

namespace hamflow {

/// A symmetric-matrix valued field B(t,x): either a constant 2m x 2m matrix or
/// samples over the space-time points of a collocation grid. Acts on fields by
/// pointwise multiplication followed by projection.
class MatrixField {
public:
    enum class Kind { Constant, Sampled };

    MatrixField() = default;

    static MatrixField scalar(Real b, int m);
    static MatrixField constant(Matrix B);
    /// One sample per grid point, layout matching GridSpec::split_point.
    static MatrixField sampled(std::shared_ptr<const GridSpec> grid, std::vector<Matrix> samples);
    static MatrixField sampled_from(std::shared_ptr<const GridSpec> grid,
                                    const std::function<Matrix(Real, const Vector&)>& fn);

    Kind kind() const { return kind_; }
    int m() const { return m_; }
    Index sample_count() const;
    const Matrix& sample(Index point) const;
    const GridSpec* grid() const { return grid_.get(); }

    /// Throws ConfigError unless every sample is symmetric within tol.
    void require_symmetric(Real tol = 1e-14) const;

    /// a*this + b*other, pointwise (constants broadcast over samples).
    MatrixField linear_combination(Real a, Real b, const MatrixField& other) const;

    /// Largest spectral norm over samples.
    Real sup_operator_norm() const;

private:
    Kind kind_ = Kind::Constant;
    int m_ = 0;
    Matrix constant_;
    std::shared_ptr<const GridSpec> grid_;
    std::vector<Matrix> samples_;
};

/// Partial-order test: A <= B iff the minimum eigenvalue of (B - A) is
/// >= -tol at every sample (floating-point-safe gate).
bool partial_order_leq(const MatrixField& A, const MatrixField& B, Real tol = 1e-12);

/// Dense embedding of the multiplication operator z -> B(t,x) z on the
/// truncated space. Exact for constants; collocation-multiply-then-project on
/// the field's grid otherwise (result symmetrized to kill round-off skew).
Matrix assemble_B(const ModeSet& modes, const MatrixField& B);

} // namespace hamflow

#endif
