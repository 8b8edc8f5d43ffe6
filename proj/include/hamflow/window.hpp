#ifndef HAMFLOW_WINDOW_HPP
#define HAMFLOW_WINDOW_HPP

#include <vector>

#include "hamflow/domain.hpp"

namespace hamflow {

/// Spectral window splitting: the inner space collects every invariant group
/// with |eigenvalue| <= l_h, the outer space the rest. Whole groups go to one
/// side because a group's eigenvalues share a single magnitude, so both masks
/// are plain coefficient index sets.
struct WindowDecomposition {
    Real l_h = 0.0;            // effective half-width (possibly nudged)
    Real requested_l_h = 0.0;
    bool nudged = false;
    Real delta = 0.0;          // distance from l_h to the truncated spectrum
    std::vector<Index> inner_idx;
    std::vector<Index> outer_idx;
    std::vector<Index> inner_groups;  // group indices
    std::vector<Index> outer_groups;
    Index inner_dim = 0;
};

/// Builds the window. If l_h lands within 1e-9 of a spectrum magnitude it is
/// nudged to the midpoint of the gap above (reported via `nudged`), so the
/// admissibility condition l_h not in sigma(L) always holds on truncations.
WindowDecomposition build_window(const ModeSet& modes, Real l_h);

Vector gather(const VectorRef& full, const std::vector<Index>& idx);
void scatter_into(Vector& full, const std::vector<Index>& idx, const VectorRef& vals);

} // namespace hamflow

#endif
