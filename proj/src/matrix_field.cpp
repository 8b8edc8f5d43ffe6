#include "hamflow/matrix_field.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "hamflow/errors.hpp"
#include "hamflow/operator.hpp"

namespace hamflow {

MatrixField MatrixField::scalar(Real b, int m) {
    MatrixField f;
    f.kind_ = Kind::Constant;
    f.m_ = m;
    f.constant_ = b * Matrix::Identity(2 * m, 2 * m);
    return f;
}

MatrixField MatrixField::constant(Matrix B) {
    if (B.rows() != B.cols() || B.rows() % 2 != 0)
        throw ConfigError("index_core", "matrix_field", "constant value must be 2m x 2m");
    MatrixField f;
    f.kind_ = Kind::Constant;
    f.m_ = static_cast<int>(B.rows() / 2);
    f.constant_ = std::move(B);
    return f;
}

MatrixField MatrixField::sampled(std::shared_ptr<const GridSpec> grid,
                                 std::vector<Matrix> samples) {
    if (!grid) throw ConfigError("index_core", "matrix_field", "sampled field needs a grid");
    if (static_cast<Index>(samples.size()) != grid->point_count())
        throw ConfigError("index_core", "matrix_field",
                          "need one sample per grid point: " +
                              std::to_string(grid->point_count()) + " expected, " +
                              std::to_string(samples.size()) + " given");
    MatrixField f;
    f.kind_ = Kind::Sampled;
    f.m_ = grid->domain.m;
    f.grid_ = std::move(grid);
    f.samples_ = std::move(samples);
    for (const Matrix& s : f.samples_)
        if (s.rows() != 2 * f.m_ || s.cols() != 2 * f.m_)
            throw ConfigError("index_core", "matrix_field", "sample has wrong shape");
    return f;
}

MatrixField MatrixField::sampled_from(std::shared_ptr<const GridSpec> grid,
                                      const std::function<Matrix(Real, const Vector&)>& fn) {
    std::vector<Matrix> samples;
    samples.reserve(static_cast<std::size_t>(grid->point_count()));
    for (Index p = 0; p < grid->point_count(); ++p) {
        auto [t, flat] = grid->split_point(p);
        samples.push_back(fn(grid->time_at(t), grid->space_at(flat)));
    }
    return sampled(std::move(grid), std::move(samples));
}

Index MatrixField::sample_count() const {
    return kind_ == Kind::Constant ? 1 : static_cast<Index>(samples_.size());
}

const Matrix& MatrixField::sample(Index point) const {
    if (kind_ == Kind::Constant) return constant_;
    return samples_[static_cast<std::size_t>(point)];
}

void MatrixField::require_symmetric(Real tol) const {
    for (Index i = 0; i < sample_count(); ++i) {
        const Matrix& s = sample(i);
        if ((s - s.transpose()).cwiseAbs().maxCoeff() > tol)
            throw ConfigError("index_core", "matrix_field",
                              "sample " + std::to_string(i) + " is not symmetric within " +
                                  std::to_string(tol));
    }
}

MatrixField MatrixField::linear_combination(Real a, Real b, const MatrixField& other) const {
    if (m_ != other.m_)
        throw ConfigError("index_core", "matrix_field", "component count mismatch");
    if (kind_ == Kind::Constant && other.kind_ == Kind::Constant)
        return MatrixField::constant(a * constant_ + b * other.constant_);
    const MatrixField& samp = kind_ == Kind::Sampled ? *this : other;
    if (kind_ == Kind::Sampled && other.kind_ == Kind::Sampled && !(*grid_ == *other.grid_))
        throw ConfigError("index_core", "matrix_field", "sampled fields live on different grids");
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(samp.sample_count()));
    for (Index p = 0; p < samp.sample_count(); ++p)
        out.push_back(a * sample(kind_ == Kind::Sampled ? p : 0) +
                      b * other.sample(other.kind_ == Kind::Sampled ? p : 0));
    return MatrixField::sampled(samp.grid_, std::move(out));
}

Real MatrixField::sup_operator_norm() const {
    Real best = 0.0;
    for (Index i = 0; i < sample_count(); ++i) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(sample(i), Eigen::EigenvaluesOnly);
        best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    return best;
}

bool partial_order_leq(const MatrixField& A, const MatrixField& B, Real tol) {
    if (A.m() != B.m())
        throw ConfigError("index_core", "partial_order", "component count mismatch");
    const Index n = std::max(A.sample_count(), B.sample_count());
    if (A.kind() == MatrixField::Kind::Sampled && B.kind() == MatrixField::Kind::Sampled &&
        !(*A.grid() == *B.grid()))
        throw ConfigError("index_core", "partial_order", "sampled fields on different grids");
    for (Index p = 0; p < n; ++p) {
        const Matrix diff = B.sample(B.kind() == MatrixField::Kind::Sampled ? p : 0) -
                            A.sample(A.kind() == MatrixField::Kind::Sampled ? p : 0);
        Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol) return false;
    }
    return true;
}

Matrix assemble_B(const ModeSet& modes, const MatrixField& B) {
    if (B.m() != modes.domain.m)
        throw ConfigError("index_core", "assemble_B", "component count mismatch");
    if (B.kind() == MatrixField::Kind::Constant)
        return assemble_constant_B(modes, B.sample(0));

    const GridSpec& grid = *B.grid();
    require_compatible(grid, modes);
    const int comps = modes.domain.components();
    Matrix E(modes.total_dim, modes.total_dim);
    Vector unit = Vector::Zero(modes.total_dim);
    Vector product(grid.value_count());
    for (Index j = 0; j < modes.total_dim; ++j) {
        unit[j] = 1.0;
        const Vector vals = to_grid(modes, unit, grid);
        unit[j] = 0.0;
        for (Index p = 0; p < grid.point_count(); ++p)
            product.segment(p * comps, comps) = B.sample(p) * vals.segment(p * comps, comps);
        E.col(j) = to_coeffs(modes, product, grid);
    }
    return 0.5 * (E + E.transpose());
}

} // namespace hamflow
