#include "hamflow/index.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hamflow/errors.hpp"
#include "hamflow/operator.hpp"

namespace hamflow {

namespace {

Vector pencil_eigenvalues(const Matrix& op) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(op, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

int count_negative(const Vector& eigs, Real tol) {
    int n = 0;
    for (Index i = 0; i < eigs.size(); ++i)
        if (eigs[i] <= -tol) ++n;
    return n;
}

int count_null(const Vector& eigs, Real tol) {
    int n = 0;
    for (Index i = 0; i < eigs.size(); ++i)
        if (std::abs(eigs[i]) < tol) ++n;
    return n;
}

struct LevelCounts {
    int mu;
    int nu;
};

LevelCounts counts_at_level(const MatrixField& B, const ModeSet& modes, Real tol) {
    const Matrix L = assemble_truncated_L(modes);
    const Matrix op = L - assemble_B(modes, B);
    const Vector pencil = pencil_eigenvalues(op);
    const Vector bare = pencil_eigenvalues(L);
    return {count_negative(pencil, tol) - count_negative(bare, tol), count_null(pencil, tol)};
}

} // namespace

int nullity(const MatrixField& B, const ModeSet& modes, Real tol) {
    if (!(tol > 0.0))
        throw PreconditionError("index_core", "nullity", "tolerance must be > 0");
    const Matrix op = assemble_truncated_L(modes) - assemble_B(modes, B);
    return count_null(pencil_eigenvalues(op), tol);
}

int negative_count(const MatrixField& B, const ModeSet& modes, Real tol) {
    const Matrix op = assemble_truncated_L(modes) - assemble_B(modes, B);
    return count_negative(pencil_eigenvalues(op), tol);
}

IndexPair relative_index(const MatrixField& B, const ModeSet& modes, Real tol) {
    B.require_symmetric();
    const ModeSet fine = refine_one_level(modes);
    const LevelCounts c0 = counts_at_level(B, modes, tol);
    const LevelCounts c1 = counts_at_level(B, fine, tol);
    IndexPair pair;
    pair.history.push_back({modes.total_dim, modes.k_max, modes.spatial_cutoff, c0.mu, c0.nu});
    pair.history.push_back({fine.total_dim, fine.k_max, fine.spatial_cutoff, c1.mu, c1.nu});
    if (c0.mu != c1.mu) {
        std::ostringstream msg;
        msg << "relative index did not stabilize: mu=" << c0.mu << " at dim "
            << modes.total_dim << " vs mu=" << c1.mu << " at dim " << fine.total_dim;
        throw NonStabilizedError("index_core", "relative_index", msg.str());
    }
    pair.mu = c0.mu;
    pair.nu = c0.nu;
    return pair;
}

FlowResult spectral_flow(const MatrixField& B1, const MatrixField& B2, int steps,
                         const ModeSet& modes, Real tol) {
    if (steps < 2)
        throw PreconditionError("index_core", "spectral_flow", "steps must be >= 2");
    if (!partial_order_leq(B1, B2))
        throw PreconditionError("index_core", "spectral_flow",
                                "order violation: B1 <= B2 fails the partial-order test");
    const Matrix L = assemble_truncated_L(modes);
    const Matrix E1 = assemble_B(modes, B1);
    const Matrix E2 = assemble_B(modes, B2);

    auto eigenvalues_at = [&](Real s) { return pencil_eigenvalues(L - (1.0 - s) * E1 - s * E2); };
    // strict sign counting locates the true crossing parameter; the kernel
    // tolerance is only used to confirm the multiplicity at the located point
    auto nminus = [&](Real s) {
        const Vector eigs = eigenvalues_at(s);
        int n = 0;
        for (Index i = 0; i < eigs.size(); ++i)
            if (eigs[i] < 0.0) ++n;
        return n;
    };

    constexpr Real kResolution = 1e-10;
    FlowResult result;

    // recursive bisection on negative-count jumps; the path is monotone
    // (B2 - B1 >= 0), so each jump is a zero crossing
    struct Frame {
        Real a, b;
        int na, nb;
    };
    std::vector<Frame> stack;
    const int n0 = nminus(0.0);
    const int n1 = nminus(1.0);
    Real prev_s = 0.0;
    int prev_n = n0;
    for (int i = 1; i <= steps; ++i) {
        const Real s = static_cast<Real>(i) / steps;
        const int n = i == steps ? n1 : nminus(s);
        if (n != prev_n) stack.push_back({prev_s, s, prev_n, n});
        prev_s = s;
        prev_n = n;
    }
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.b - f.a <= kResolution) {
            const Real star = 0.5 * (f.a + f.b);
            const int jump = f.nb - f.na;
            const int nu_star = count_null(eigenvalues_at(star), tol);
            if (nu_star != jump) {
                std::ostringstream msg;
                msg << "cannot separate crossings near s=" << star << ": negative-count jump "
                    << jump << " but nullity " << nu_star << " at resolution " << kResolution;
                throw UnresolvedCrossingError("index_core", "spectral_flow", msg.str());
            }
            result.crossings.push_back({star, jump});
            continue;
        }
        const Real mid = 0.5 * (f.a + f.b);
        const int nm = nminus(mid);
        if (nm != f.na) stack.push_back({f.a, mid, f.na, nm});
        if (f.nb != nm) stack.push_back({mid, f.b, nm, f.nb});
    }
    std::sort(result.crossings.begin(), result.crossings.end(),
              [](const Crossing& a, const Crossing& b) { return a.s < b.s; });
    for (const Crossing& c : result.crossings) result.flow += c.multiplicity;
    return result;
}

Real gap_radius(const MatrixField& B1, const MatrixField& B2,
                const std::vector<MatrixField>& samples, const ModeSet& modes, Real tol) {
    const IndexPair i1 = relative_index(B1, modes, tol);
    const IndexPair i2 = relative_index(B2, modes, tol);
    if (i1.mu != i2.mu)
        throw PreconditionError("index_core", "gap_radius",
                                "hypothesis violation: mu(B1)=" + std::to_string(i1.mu) +
                                    " differs from mu(B2)=" + std::to_string(i2.mu));
    if (i2.nu != 0)
        throw PreconditionError("index_core", "gap_radius",
                                "hypothesis violation: nu(B2)=" + std::to_string(i2.nu) +
                                    " is not zero");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!partial_order_leq(B1, samples[i]) || !partial_order_leq(samples[i], B2))
            throw PreconditionError("index_core", "gap_radius",
                                    "hypothesis violation: sample " + std::to_string(i) +
                                        " is not pinched between B1 and B2");
    }
    const Matrix L = assemble_truncated_L(modes);
    Real radius = std::numeric_limits<Real>::infinity();
    for (const MatrixField& B : samples) {
        const Vector eigs = pencil_eigenvalues(L - assemble_B(modes, B));
        radius = std::min(radius, eigs.cwiseAbs().minCoeff());
    }
    if (samples.empty())
        throw PreconditionError("index_core", "gap_radius", "no samples given");
    return radius;
}

} // namespace hamflow
