#include "hamflow/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hamflow/errors.hpp"

namespace hamflow {

namespace {
constexpr Real kPi = std::numbers::pi_v<Real>;
}

std::string to_string(Boundary b) {
    return b == Boundary::Dirichlet ? "dirichlet" : "neumann";
}

std::string to_string(TimeParity p) {
    switch (p) {
        case TimeParity::Constant: return "const";
        case TimeParity::Cos: return "cos";
        default: return "sin";
    }
}

void DomainSpec::validate() const {
    if (dim < 1)
        throw ConfigError("spectral_core", "domain", "dim must be >= 1");
    if (static_cast<int>(lengths.size()) != dim)
        throw ConfigError("spectral_core", "domain",
                          "expected " + std::to_string(dim) + " lengths, got " +
                              std::to_string(lengths.size()));
    for (Real L : lengths)
        if (!(L > 0.0))
            throw ConfigError("spectral_core", "domain", "all box lengths must be > 0");
    if (!(period > 0.0))
        throw ConfigError("spectral_core", "domain", "period must be > 0");
    if (m < 1)
        throw ConfigError("spectral_core", "domain", "m must be >= 1");
}

Real DomainSpec::volume() const {
    Real v = 1.0;
    for (Real L : lengths) v *= L;
    return v;
}

Real DomainSpec::space_time_measure() const { return period * volume(); }

Real DomainSpec::time_frequency(int k) const {
    return 2.0 * kPi * static_cast<Real>(k) / period;
}

Real ModeBlock::magnitude() const { return std::hypot(omega, mu); }

std::pair<Real, Real> mode_eigenvalues(const ModeBlock& block) {
    const Real lam = block.magnitude();
    return {lam, -lam};
}

namespace {

// All admissible spatial quantum-number vectors with mu <= cutoff.
void enumerate_spatial(const DomainSpec& domain, Real cutoff, int d, std::vector<int>& n,
                       Real partial, std::vector<std::pair<Real, std::vector<int>>>& out) {
    if (d == domain.dim) {
        out.emplace_back(partial, n);
        return;
    }
    const int lo = domain.boundary == Boundary::Dirichlet ? 1 : 0;
    const Real L = domain.lengths[static_cast<std::size_t>(d)];
    for (int nd = lo;; ++nd) {
        const Real f = static_cast<Real>(nd) * kPi / L;
        const Real mu = partial + f * f;
        if (mu > cutoff) break;
        n[static_cast<std::size_t>(d)] = nd;
        enumerate_spatial(domain, cutoff, d + 1, n, mu, out);
    }
}

} // namespace

ModeSet enumerate_modes(const DomainSpec& domain, int k_max, Real spatial_cutoff) {
    domain.validate();
    if (k_max < 0)
        throw ConfigError("spectral_core", "enumerate_modes", "k_max must be >= 0");

    std::vector<std::pair<Real, std::vector<int>>> spatial;
    std::vector<int> scratch(static_cast<std::size_t>(domain.dim), 0);
    enumerate_spatial(domain, spatial_cutoff, 0, scratch, 0.0, spatial);
    if (spatial.empty())
        throw ConfigError("spectral_core", "enumerate_modes",
                          "empty mode set: spatial_cutoff " + std::to_string(spatial_cutoff) +
                              " lies below the first eigenvalue of -Laplace");

    ModeSet ms;
    ms.domain = domain;
    ms.k_max = k_max;
    ms.spatial_cutoff = spatial_cutoff;

    for (const auto& [mu, n] : spatial) {
        for (int k = 0; k <= k_max; ++k) {
            ModeBlock b;
            b.k = k;
            b.omega = domain.time_frequency(k);
            b.n = n;
            b.mu = mu;
            if (k == 0) {
                b.parity = TimeParity::Constant;
                ms.blocks.push_back(b);
            } else {
                b.parity = TimeParity::Cos;
                ms.blocks.push_back(b);
                b.parity = TimeParity::Sin;
                ms.blocks.push_back(b);
            }
        }
    }

    // Deterministic order: (mu, k, n, parity). Parity last so that the cos/sin
    // partners of one (k, n) stay adjacent even when mu is degenerate.
    std::sort(ms.blocks.begin(), ms.blocks.end(), [](const ModeBlock& a, const ModeBlock& b) {
        if (a.mu != b.mu) return a.mu < b.mu;
        if (a.k != b.k) return a.k < b.k;
        if (a.n != b.n) return a.n < b.n;
        return static_cast<int>(a.parity) < static_cast<int>(b.parity);
    });

    const int c = domain.components();
    ms.total_dim = static_cast<Index>(ms.blocks.size()) * c;

    for (Index b = 0; b < static_cast<Index>(ms.blocks.size());) {
        const ModeBlock& blk = ms.blocks[static_cast<std::size_t>(b)];
        ModeGroup g;
        g.block_first = b;
        g.block_count = blk.k == 0 ? 1 : 2;
        g.k = blk.k;
        g.omega = blk.omega;
        g.mu = blk.mu;
        g.magnitude = blk.magnitude();
        g.coeff_first = b * c;
        g.coeff_count = static_cast<Index>(g.block_count) * c;
        ms.groups.push_back(g);
        b += g.block_count;
    }
    return ms;
}

int ModeSet::max_spatial_index(int d) const {
    int lmax = 0;
    for (const ModeBlock& b : blocks)
        lmax = std::max(lmax, b.n[static_cast<std::size_t>(d)]);
    return lmax;
}

std::vector<Real> ModeSet::magnitudes() const {
    std::vector<Real> mags;
    mags.reserve(groups.size());
    for (const ModeGroup& g : groups) mags.push_back(g.magnitude);
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end(),
                           [](Real a, Real b) { return std::abs(a - b) < 1e-12; }),
               mags.end());
    return mags;
}

Real next_spatial_eigenvalue(const DomainSpec& domain, Real above) {
    // Growing the search window geometrically always terminates for a box:
    // incrementing one quantum number raises mu by a bounded step.
    Real bound = std::max(above * 2.0, above + 1.0);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<std::pair<Real, std::vector<int>>> spatial;
        std::vector<int> scratch(static_cast<std::size_t>(domain.dim), 0);
        enumerate_spatial(domain, bound, 0, scratch, 0.0, spatial);
        Real best = std::numeric_limits<Real>::infinity();
        for (const auto& [mu, n] : spatial)
            if (mu > above && mu < best) best = mu;
        if (std::isfinite(best)) return best;
        bound *= 2.0;
    }
    throw ConfigError("spectral_core", "next_spatial_eigenvalue",
                      "could not locate a spatial eigenvalue above " + std::to_string(above));
}

ModeSet refine_one_level(const ModeSet& modes) {
    const Real next_mu = next_spatial_eigenvalue(modes.domain, modes.spatial_cutoff);
    return enumerate_modes(modes.domain, modes.k_max + 1, next_mu * (1.0 + 1e-12) + 1e-12);
}

} // namespace hamflow
