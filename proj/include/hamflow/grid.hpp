#ifndef HAMFLOW_GRID_HPP
#define HAMFLOW_GRID_HPP

#include <vector>

#include "hamflow/domain.hpp"
#include "hamflow/types.hpp"

namespace hamflow {

/// Collocation grid: uniform periodic nodes in time, type-I sine nodes per
/// Dirichlet dimension (interior points), type-I cosine nodes per Neumann
/// dimension (endpoints included). Values are stored flat with layout
/// (t, x_1, ..., x_N, component), component fastest.
struct GridSpec {
    DomainSpec domain;
    int nt = 1;
    std::vector<int> npts; // per spatial dimension

    Index space_count() const;
    Index point_count() const;              // nt * prod(npts)
    Index value_count() const;              // point_count * 2m

    Real time_at(int j) const;
    /// Spatial coordinates of the flattened space index.
    Vector space_at(Index flat_space) const;
    /// Quadrature weight of a space-time point (trapezoid ends for Neumann).
    Real weight_at(Index point) const;

    /// point index -> (time index, flat space index)
    std::pair<int, Index> split_point(Index point) const;

    bool operator==(const GridSpec&) const = default;
};

/// Grid resolving every mode of the set at least 2x (anti-aliasing default
/// for pointwise nonlinearities).
GridSpec default_grid(const ModeSet& modes, Real oversample = 2.0);

/// Throws ConfigError unless the grid resolves all modes exactly:
/// nt >= 2*k_max+1 and per-dimension point counts above the largest quantum
/// number (strictly below the cosine Nyquist line for Neumann).
void require_compatible(const GridSpec& grid, const ModeSet& modes);

/// Synthesis: coefficients over the mode set -> values on the grid.
Vector to_grid(const ModeSet& modes, const VectorRef& coeffs, const GridSpec& grid);

/// Analysis: grid values -> coefficients (exact left inverse of to_grid on the
/// truncated space; fast trigonometric transforms throughout).
Vector to_coeffs(const ModeSet& modes, const VectorRef& values, const GridSpec& grid);

/// Quadrature L2 norm of grid values (all components).
Real grid_norm(const GridSpec& grid, const VectorRef& values);

} // namespace hamflow

#endif
