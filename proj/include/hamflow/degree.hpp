#ifndef HAMFLOW_DEGREE_HPP
#define HAMFLOW_DEGREE_HPP

#include <cstdint>

#include "hamflow/newton.hpp"

namespace hamflow {

struct DegreeSettings {
    int starts = 24;             // multistart Newton attempts inside the ball
    int boundary_samples = 64;   // sphere probes for the no-boundary-zero gate
    int winding_samples = 512;   // circle resolution of the dim-2 cross-check
    Real newton_tol = 1e-10;
    std::uint64_t seed = 0;
};

/// Brouwer degree of `map` on the ball of the given radius about 0, as the
/// sum of Jacobian-determinant signs over de-duplicated regular zeros found
/// by multistart Newton. For dim <= 2 an independent boundary-winding count
/// is computed and must agree. Throws PreconditionError when a boundary
/// sample is (numerically) a zero, SolverError on a cross-check mismatch or
/// a degenerate zero. dim = 0 returns 1.
int brouwer_degree(const MapFn& map, int dim, Real radius, const DegreeSettings& settings = {});

} // namespace hamflow

#endif
