#include "hamflow/degree.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "hamflow/errors.hpp"

namespace hamflow {

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;

Vector unit_gaussian(std::mt19937_64& rng, int dim) {
    std::normal_distribution<Real> gauss(0.0, 1.0);
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = gauss(rng);
    const Real n = v.norm();
    return n > 0 ? Vector(v / n) : Vector(Vector::Unit(dim, 0));
}

// winding number of the planar curve theta -> map(R e(theta)) about 0
int winding_number(const MapFn& map, Real radius, int samples) {
    int n = samples;
    for (int attempt = 0; attempt < 4; ++attempt) {
        Real total = 0.0;
        Real max_step = 0.0;
        Vector x(2);
        Real prev_angle = 0.0;
        bool first = true;
        for (int i = 0; i <= n; ++i) {
            const Real th = 2.0 * kPi * static_cast<Real>(i % n) / n;
            x[0] = radius * std::cos(th);
            x[1] = radius * std::sin(th);
            const Vector f = map(x);
            const Real ang = std::atan2(f[1], f[0]);
            if (!first) {
                Real d = ang - prev_angle;
                while (d > kPi) d -= 2.0 * kPi;
                while (d < -kPi) d += 2.0 * kPi;
                total += d;
                max_step = std::max(max_step, std::abs(d));
            }
            prev_angle = ang;
            first = false;
        }
        if (max_step < 1.0) return static_cast<int>(std::lround(total / (2.0 * kPi)));
        n *= 2; // curve under-resolved; refine
    }
    throw SolverError("homotopy_engine", "brouwer_degree",
                      "winding cross-check could not resolve the boundary curve");
}

} // namespace

int brouwer_degree(const MapFn& map, int dim, Real radius, const DegreeSettings& settings) {
    if (dim < 0)
        throw PreconditionError("homotopy_engine", "brouwer_degree", "dimension must be >= 0");
    if (!(radius > 0.0))
        throw PreconditionError("homotopy_engine", "brouwer_degree", "radius must be > 0");
    if (dim == 0) return 1;

    std::mt19937_64 rng(settings.seed);

    // gate: no zeros on the boundary sphere
    const Real boundary_tol = 1e-8 * (1.0 + radius);
    Real min_boundary = std::numeric_limits<Real>::infinity();
    std::vector<Vector> probes;
    for (int i = 0; i < dim; ++i) {
        probes.push_back(Vector(radius * Vector::Unit(dim, i)));
        probes.push_back(Vector(-radius * Vector::Unit(dim, i)));
    }
    for (int i = 0; i < settings.boundary_samples; ++i)
        probes.push_back(Vector(radius * unit_gaussian(rng, dim)));
    for (const Vector& p : probes) min_boundary = std::min(min_boundary, map(p).norm());
    if (min_boundary <= boundary_tol)
        throw PreconditionError("homotopy_engine", "brouwer_degree",
                                "zero on the boundary sphere: min sampled |F| = " +
                                    std::to_string(min_boundary));

    // enumerate regular zeros inside the ball
    NewtonSettings ns;
    ns.tol = settings.newton_tol * (1.0 + radius);
    ns.max_iters = 80;
    std::vector<Vector> starts;
    starts.push_back(Vector(Vector::Zero(dim)));
    for (int i = 0; i < settings.starts; ++i) {
        const Real r = radius * std::pow(std::uniform_real_distribution<Real>(0, 1)(rng),
                                         1.0 / dim);
        starts.push_back(Vector(r * unit_gaussian(rng, dim)));
    }
    std::vector<Vector> zeros;
    const Real dedup = 1e-6 * (1.0 + 1e-2 * radius);
    for (const Vector& s : starts) {
        const NewtonResult nr = newton_solve(map, s, ns);
        if (!nr.converged) continue;
        if (nr.x.norm() >= radius * (1.0 - 1e-9)) continue;
        bool dup = false;
        for (const Vector& z : zeros)
            if ((z - nr.x).norm() <= dedup) {
                dup = true;
                break;
            }
        if (!dup) zeros.push_back(nr.x);
    }
    std::sort(zeros.begin(), zeros.end(), [](const Vector& a, const Vector& b) {
        const Real na = a.norm(), nb = b.norm();
        if (na != nb) return na < nb;
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                            b.data() + b.size());
    });

    int degree = 0;
    for (const Vector& z : zeros) {
        const Matrix J = fd_jacobian(map, z);
        const Real det = J.partialPivLu().determinant();
        if (det == 0.0 || !std::isfinite(det))
            throw SolverError("homotopy_engine", "brouwer_degree",
                              "degenerate zero (vanishing Jacobian determinant)");
        degree += det > 0 ? 1 : -1;
    }

    if (dim == 1) {
        Vector left(1), right(1);
        left[0] = -radius;
        right[0] = radius;
        const Real fl = map(left)[0];
        const Real fr = map(right)[0];
        const int cross = ((fr > 0) - (fr < 0) - ((fl > 0) - (fl < 0))) / 2;
        if (cross != degree) {
            std::ostringstream msg;
            msg << "cross-check mismatch in dim 1: endpoint signs give " << cross
                << ", zero enumeration gives " << degree;
            throw SolverError("homotopy_engine", "brouwer_degree", msg.str());
        }
    } else if (dim == 2) {
        const int wind = winding_number(map, radius, settings.winding_samples);
        if (wind != degree) {
            std::ostringstream msg;
            msg << "cross-check mismatch in dim 2: boundary winding " << wind
                << ", zero enumeration gives " << degree;
            throw SolverError("homotopy_engine", "brouwer_degree", msg.str());
        }
    }
    return degree;
}

} // namespace hamflow
