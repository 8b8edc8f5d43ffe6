#ifndef HAMFLOW_DOMAIN_HPP
#define HAMFLOW_DOMAIN_HPP

#include <string>
#include <utility>
#include <vector>

#include "hamflow/types.hpp"

namespace hamflow {

enum class Boundary { Dirichlet, Neumann };

std::string to_string(Boundary b);

/// Geometry fixing the space-time basis: a box Omega = prod (0, L_i), the
/// spatial boundary condition, the time period T and the number of field
/// components 2m.
struct DomainSpec {
    int dim = 1;
    std::vector<Real> lengths;
    Boundary boundary = Boundary::Dirichlet;
    Real period = 0.0;
    int m = 1;

    /// Throws ConfigError unless dim >= 1, all lengths > 0, period > 0, m >= 1.
    void validate() const;

    Real volume() const;                   // prod L_i
    Real space_time_measure() const;       // T * |Omega|
    Real time_frequency(int k) const;      // 2*pi*k / T
    int components() const { return 2 * m; }

    bool operator==(const DomainSpec&) const = default;
};

enum class TimeParity { Constant, Cos, Sin };

std::string to_string(TimeParity p);

/// One scalar space-time basis function: time factor (k, parity) times the
/// spatial eigenfunction with quantum numbers n, tensored with R^{2m}.
struct ModeBlock {
    int k = 0;                 // time frequency index, k >= 0
    Real omega = 0.0;          // 2*pi*k / T
    std::vector<int> n;        // spatial quantum numbers, n_i >= 1 (Dirichlet) or >= 0 (Neumann)
    Real mu = 0.0;             // spatial eigenvalue sum (n_i*pi/L_i)^2
    TimeParity parity = TimeParity::Constant;

    /// |eigenvalue| of the operator block this mode belongs to.
    Real magnitude() const;
};

/// Eigenvalues of the operator restricted to the mode's invariant block:
/// the pair +/- sqrt(omega_k^2 + mu^2). Each sign carries multiplicity m
/// inside the block (2m jointly for a cos/sin pair).
std::pair<Real, Real> mode_eigenvalues(const ModeBlock& block);

/// Invariant subspace of consecutive blocks: a lone k=0 block (2m coords) or a
/// cos/sin pair (4m coords) coupled through the time derivative.
struct ModeGroup {
    Index block_first = 0;
    int block_count = 1;
    int k = 0;
    Real omega = 0.0;
    Real mu = 0.0;
    Real magnitude = 0.0;
    Index coeff_first = 0;     // first coefficient index
    Index coeff_count = 0;     // block_count * 2m
};

/// Rectangular truncation of L^2(S^1 x Omega, R^{2m}): every block with
/// |k| <= k_max and mu <= spatial_cutoff, deterministically ordered
/// lexicographically in (mu, k, n, parity); coefficients store the 2m
/// components of each block consecutively.
struct ModeSet {
    DomainSpec domain;
    int k_max = 0;
    Real spatial_cutoff = 0.0;
    std::vector<ModeBlock> blocks;
    std::vector<ModeGroup> groups;
    Index total_dim = 0;

    Index block_offset(Index b) const { return b * domain.components(); }
    /// Largest spatial quantum number appearing in dimension d.
    int max_spatial_index(int d) const;
    /// Sorted distinct block eigenvalue magnitudes.
    std::vector<Real> magnitudes() const;
};

ModeSet enumerate_modes(const DomainSpec& domain, int k_max, Real spatial_cutoff);

/// One truncation level up: k_max+1 and the cutoff extended just past the next
/// distinct spatial eigenvalue. Used by index stabilization certificates.
ModeSet refine_one_level(const ModeSet& modes);

/// Smallest distinct spatial eigenvalue of -Laplace strictly above `above`.
Real next_spatial_eigenvalue(const DomainSpec& domain, Real above);

} // namespace hamflow

#endif
