#ifndef HAMFLOW_INDEX_HPP
#define HAMFLOW_INDEX_HPP

#include <vector>

#include "hamflow/matrix_field.hpp"

namespace hamflow {

/// Counting tolerances: eigenvalues with |lambda| < null_tol count as kernel;
/// lambda <= -null_tol as negative.
inline constexpr Real kDefaultNullityTol = 1e-8;

/// Relative Morse index pair on a stabilized truncation, normalized by
/// mu(0) = 0: mu = n^-(L - B) - n^-(L) counted on the same mode set, nu the
/// kernel dimension. The history records the certifying truncation ladder.
struct IndexPair {
    int mu = 0;
    int nu = 0;
    struct Level {
        Index total_dim;
        int k_max;
        Real spatial_cutoff;
        int mu;
        int nu;
    };
    std::vector<Level> history;
};

/// Number of eigenvalues of truncated (L - B) with |lambda| < tol.
int nullity(const MatrixField& B, const ModeSet& modes, Real tol = kDefaultNullityTol);

/// Negative-count helper, n^-(L - B) with the tolerance convention above.
int negative_count(const MatrixField& B, const ModeSet& modes, Real tol = kDefaultNullityTol);

/// Computes mu on the given truncation and on one refined level; throws
/// NonStabilizedError (reporting both values) if they disagree.
IndexPair relative_index(const MatrixField& B, const ModeSet& modes,
                         Real tol = kDefaultNullityTol);

struct Crossing {
    Real s;
    int multiplicity;
};

struct FlowResult {
    int flow = 0;
    std::vector<Crossing> crossings;
};

/// Sum over s in [0,1) of the nullity of L - (s B2 + (1-s) B1), located by
/// grid sampling plus bisection of negative-count jumps to resolution 1e-10.
/// Requires B1 <= B2; equals relative_index(B2).mu - relative_index(B1).mu
/// when the additivity identity holds on the truncation.
FlowResult spectral_flow(const MatrixField& B1, const MatrixField& B2, int steps,
                         const ModeSet& modes, Real tol = kDefaultNullityTol);

/// Certified spectral-gap radius: min over samples of min |eig(L - B)|, gated
/// by mu(B1) = mu(B2), nu(B2) = 0 and B1 <= B <= B2 for every sample.
Real gap_radius(const MatrixField& B1, const MatrixField& B2,
                const std::vector<MatrixField>& samples, const ModeSet& modes,
                Real tol = kDefaultNullityTol);

} // namespace hamflow

#endif
