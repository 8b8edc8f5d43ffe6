#include "hamflow/window.hpp"

#include <algorithm>
#include <cmath>

#include "hamflow/errors.hpp"

namespace hamflow {

WindowDecomposition build_window(const ModeSet& modes, Real l_h) {
    if (!(l_h > 0.0))
        throw PreconditionError("reduction_solver", "build_window", "l_h must be > 0");
    const std::vector<Real> mags = modes.magnitudes();

    WindowDecomposition w;
    w.requested_l_h = l_h;
    w.l_h = l_h;

    constexpr Real kNear = 1e-9;
    auto nearest = [&](Real v) {
        Real best = std::numeric_limits<Real>::infinity();
        for (Real g : mags) best = std::min(best, std::abs(g - v));
        return best;
    };
    if (nearest(l_h) < kNear) {
        // sit exactly on an eigenvalue magnitude: move to the midpoint of the
        // gap above (keeps model.l_h <= window.l_h satisfiable)
        Real g = mags.front();
        for (Real cand : mags)
            if (std::abs(cand - l_h) < std::abs(g - l_h)) g = cand;
        Real next = std::numeric_limits<Real>::infinity();
        for (Real cand : mags)
            if (cand > g + kNear) {
                next = cand;
                break;
            }
        if (!std::isfinite(next)) next = g + std::max(1.0, g);
        w.l_h = 0.5 * (g + next);
        w.nudged = true;
    }
    w.delta = nearest(w.l_h);

    for (Index gi = 0; gi < static_cast<Index>(modes.groups.size()); ++gi) {
        const ModeGroup& g = modes.groups[static_cast<std::size_t>(gi)];
        const bool inner = g.magnitude <= w.l_h;
        auto& groups = inner ? w.inner_groups : w.outer_groups;
        auto& idx = inner ? w.inner_idx : w.outer_idx;
        groups.push_back(gi);
        for (Index c = 0; c < g.coeff_count; ++c) idx.push_back(g.coeff_first + c);
    }
    w.inner_dim = static_cast<Index>(w.inner_idx.size());
    return w;
}

Vector gather(const VectorRef& full, const std::vector<Index>& idx) {
    Vector out(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = full[idx[i]];
    return out;
}

void scatter_into(Vector& full, const std::vector<Index>& idx, const VectorRef& vals) {
    for (std::size_t i = 0; i < idx.size(); ++i) full[idx[i]] = vals[static_cast<Index>(i)];
}

} // namespace hamflow
