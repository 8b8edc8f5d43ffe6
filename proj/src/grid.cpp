#include "hamflow/grid.hpp"

#include <cmath>
#include <numbers>

#include "hamflow/errors.hpp"
#include "hamflow/fft.hpp"

namespace hamflow {

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;

Index product(const std::vector<int>& v) {
    Index p = 1;
    for (int x : v) p *= x;
    return p;
}

// Time slot packing: slot 0 holds k=0, slots (2k-1, 2k) hold (cos, sin) of
// frequency k. Valid as long as 2*k_max + 1 <= nt.
Index time_slot(const ModeBlock& b) {
    if (b.k == 0) return 0;
    return b.parity == TimeParity::Cos ? 2 * b.k - 1 : 2 * b.k;
}

Index spatial_slot(const DomainSpec& domain, const ModeBlock& b, int d) {
    const int n = b.n[static_cast<std::size_t>(d)];
    return domain.boundary == Boundary::Dirichlet ? n - 1 : n;
}

template <class Fn>
void for_each_line(const std::vector<Index>& dims, std::size_t axis, Fn&& fn) {
    Index pre = 1, post = 1;
    for (std::size_t i = 0; i < axis; ++i) pre *= dims[i];
    for (std::size_t i = axis + 1; i < dims.size(); ++i) post *= dims[i];
    const Index len = dims[axis];
    for (Index p = 0; p < pre; ++p)
        for (Index q = 0; q < post; ++q) fn(p * len * post + q, post);
}

std::vector<Index> tensor_dims(const GridSpec& grid) {
    std::vector<Index> dims;
    dims.push_back(grid.nt);
    for (int n : grid.npts) dims.push_back(n);
    dims.push_back(grid.domain.components());
    return dims;
}

// values at time samples -> basis-coefficient slots (quadrature-exact for
// trigonometric content below the Nyquist line)
void time_analyze(Vector& buf, const std::vector<Index>& dims, const GridSpec& grid) {
    const Real T = grid.domain.period;
    const int nt = grid.nt;
    const Real c0 = std::sqrt(T) / nt;
    const Real ck = std::sqrt(2.0 * T) / nt;
    std::vector<fft::Complex> line(static_cast<std::size_t>(nt));
    for_each_line(dims, 0, [&](Index base, Index stride) {
        for (int j = 0; j < nt; ++j)
            line[static_cast<std::size_t>(j)] = fft::Complex(buf[base + j * stride], 0.0);
        fft::fft(line, false);
        Vector slots = Vector::Zero(nt);
        slots[0] = c0 * line[0].real();
        for (int k = 1; 2 * k < nt; ++k) {
            if (2 * k - 1 < nt) slots[2 * k - 1] = ck * line[static_cast<std::size_t>(k)].real();
            if (2 * k < nt) slots[2 * k] = -ck * line[static_cast<std::size_t>(k)].imag();
        }
        for (int j = 0; j < nt; ++j) buf[base + j * stride] = slots[j];
    });
}

void time_synthesize(Vector& buf, const std::vector<Index>& dims, const GridSpec& grid) {
    const Real T = grid.domain.period;
    const int nt = grid.nt;
    const Real inv_sqrtT = 1.0 / std::sqrt(T);
    const Real amp = std::sqrt(2.0 / T);
    std::vector<fft::Complex> spec(static_cast<std::size_t>(nt));
    for_each_line(dims, 0, [&](Index base, Index stride) {
        std::fill(spec.begin(), spec.end(), fft::Complex(0.0, 0.0));
        spec[0] = fft::Complex(nt * inv_sqrtT * buf[base], 0.0);
        for (int k = 1; 2 * k < nt; ++k) {
            const Real a = 2 * k - 1 < nt ? amp * buf[base + (2 * k - 1) * stride] : 0.0;
            const Real b = 2 * k < nt ? amp * buf[base + (2 * k) * stride] : 0.0;
            spec[static_cast<std::size_t>(k)] = fft::Complex(0.5 * nt * a, -0.5 * nt * b);
            spec[static_cast<std::size_t>(nt - k)] = fft::Complex(0.5 * nt * a, 0.5 * nt * b);
        }
        fft::fft(spec, true);
        for (int j = 0; j < nt; ++j) buf[base + j * stride] = spec[static_cast<std::size_t>(j)].real();
    });
}

void spatial_analyze(Vector& buf, const std::vector<Index>& dims, const GridSpec& grid, int d) {
    const Real L = grid.domain.lengths[static_cast<std::size_t>(d)];
    const int npts = grid.npts[static_cast<std::size_t>(d)];
    Vector line(npts);
    if (grid.domain.boundary == Boundary::Dirichlet) {
        const Real scale = std::sqrt(2.0 * L) / (npts + 1);
        for_each_line(dims, static_cast<std::size_t>(d) + 1, [&](Index base, Index stride) {
            for (int q = 0; q < npts; ++q) line[q] = buf[base + q * stride];
            Vector s = fft::dst1(line);
            for (int q = 0; q < npts; ++q) buf[base + q * stride] = scale * s[q];
        });
    } else {
        const int nseg = npts - 1;
        const Real h = L / nseg;
        const Real n0 = 1.0 / std::sqrt(L);
        const Real nk = std::sqrt(2.0 / L);
        for_each_line(dims, static_cast<std::size_t>(d) + 1, [&](Index base, Index stride) {
            for (int q = 0; q < npts; ++q) line[q] = buf[base + q * stride];
            Vector c = fft::dct1(line);
            buf[base] = h * n0 * c[0];
            for (int l = 1; l < npts; ++l) buf[base + l * stride] = h * nk * c[l];
        });
    }
}

void spatial_synthesize(Vector& buf, const std::vector<Index>& dims, const GridSpec& grid, int d) {
    const Real L = grid.domain.lengths[static_cast<std::size_t>(d)];
    const int npts = grid.npts[static_cast<std::size_t>(d)];
    Vector line(npts);
    if (grid.domain.boundary == Boundary::Dirichlet) {
        const Real amp = std::sqrt(2.0 / L);
        for_each_line(dims, static_cast<std::size_t>(d) + 1, [&](Index base, Index stride) {
            for (int q = 0; q < npts; ++q) line[q] = buf[base + q * stride];
            Vector s = fft::dst1(line);
            for (int q = 0; q < npts; ++q) buf[base + q * stride] = amp * s[q];
        });
    } else {
        const int nseg = npts - 1;
        const Real n0 = 1.0 / std::sqrt(L);
        const Real nk = std::sqrt(2.0 / L);
        for_each_line(dims, static_cast<std::size_t>(d) + 1, [&](Index base, Index stride) {
            // doubled end entries turn the half-weighted DCT-I kernel into the
            // plain cosine synthesis sum
            line[0] = 2.0 * n0 * buf[base];
            for (int l = 1; l < nseg; ++l) line[l] = nk * buf[base + l * stride];
            line[nseg] = 2.0 * nk * buf[base + nseg * stride];
            Vector s = fft::dct1(line);
            for (int q = 0; q < npts; ++q) buf[base + q * stride] = s[q];
        });
    }
}

} // namespace

Index GridSpec::space_count() const { return product(npts); }
Index GridSpec::point_count() const { return static_cast<Index>(nt) * space_count(); }
Index GridSpec::value_count() const { return point_count() * domain.components(); }

Real GridSpec::time_at(int j) const { return domain.period * static_cast<Real>(j) / nt; }

Vector GridSpec::space_at(Index flat_space) const {
    Vector x(domain.dim);
    for (int d = domain.dim - 1; d >= 0; --d) {
        const int n = npts[static_cast<std::size_t>(d)];
        const Index q = flat_space % n;
        flat_space /= n;
        const Real L = domain.lengths[static_cast<std::size_t>(d)];
        x[d] = domain.boundary == Boundary::Dirichlet
                   ? static_cast<Real>(q + 1) * L / (n + 1)
                   : static_cast<Real>(q) * L / (n - 1);
    }
    return x;
}

std::pair<int, Index> GridSpec::split_point(Index point) const {
    const Index sc = space_count();
    return {static_cast<int>(point / sc), point % sc};
}

Real GridSpec::weight_at(Index point) const {
    auto [t, flat] = split_point(point);
    (void)t;
    Real w = domain.period / nt;
    for (int d = domain.dim - 1; d >= 0; --d) {
        const int n = npts[static_cast<std::size_t>(d)];
        const Index q = flat % n;
        flat /= n;
        const Real L = domain.lengths[static_cast<std::size_t>(d)];
        if (domain.boundary == Boundary::Dirichlet) {
            w *= L / (n + 1);
        } else {
            Real wd = L / (n - 1);
            if (q == 0 || q == n - 1) wd *= 0.5;
            w *= wd;
        }
    }
    return w;
}

namespace {
int next_pow2_int(int n) {
    int p = 1;
    while (p < n) p *= 2;
    return p;
}
} // namespace

GridSpec default_grid(const ModeSet& modes, Real oversample) {
    // sizes are rounded so every transform takes the radix-2 path: nt a power
    // of two, sine grids with npts+1 and cosine grids with npts-1 powers of two
    GridSpec g;
    g.domain = modes.domain;
    g.nt = next_pow2_int(
        std::max(2, static_cast<int>(std::ceil(oversample * (2 * modes.k_max + 1)))));
    for (int d = 0; d < modes.domain.dim; ++d) {
        const int lmax = modes.max_spatial_index(d);
        int n = static_cast<int>(std::ceil(oversample * (lmax + 1)));
        if (modes.domain.boundary == Boundary::Dirichlet) {
            n = next_pow2_int(std::max(n, lmax) + 1) - 1;
        } else {
            n = next_pow2_int(std::max(n + 1, lmax + 2) - 1) + 1;
        }
        g.npts.push_back(n);
    }
    return g;
}

void require_compatible(const GridSpec& grid, const ModeSet& modes) {
    if (!(grid.domain == modes.domain))
        throw ConfigError("spectral_core", "transform",
                          "grid and mode set are built over different domains");
    if (grid.nt < 2 * modes.k_max + 1)
        throw ConfigError("spectral_core", "transform",
                          "incompatible grid: nt=" + std::to_string(grid.nt) +
                              " cannot resolve k_max=" + std::to_string(modes.k_max) +
                              " (need nt >= 2*k_max+1)");
    if (static_cast<int>(grid.npts.size()) != grid.domain.dim)
        throw ConfigError("spectral_core", "transform", "grid has wrong spatial rank");
    for (int d = 0; d < grid.domain.dim; ++d) {
        const int lmax = modes.max_spatial_index(d);
        const int n = grid.npts[static_cast<std::size_t>(d)];
        const int need = grid.domain.boundary == Boundary::Dirichlet ? lmax : lmax + 2;
        if (n < std::max(need, grid.domain.boundary == Boundary::Dirichlet ? 1 : 2))
            throw ConfigError("spectral_core", "transform",
                              "incompatible grid: dimension " + std::to_string(d) + " has " +
                                  std::to_string(n) + " points, mode index up to " +
                                  std::to_string(lmax));
    }
}

Vector to_grid(const ModeSet& modes, const VectorRef& coeffs, const GridSpec& grid) {
    require_compatible(grid, modes);
    if (coeffs.size() != modes.total_dim)
        throw ConfigError("spectral_core", "transform",
                          "coefficient vector has length " + std::to_string(coeffs.size()) +
                              ", mode set needs " + std::to_string(modes.total_dim));
    const auto dims = tensor_dims(grid);
    const int comps = grid.domain.components();
    Vector buf = Vector::Zero(grid.value_count());

    // scatter coefficients into their (time slot, spatial slots, component) cell
    for (Index b = 0; b < static_cast<Index>(modes.blocks.size()); ++b) {
        const ModeBlock& blk = modes.blocks[static_cast<std::size_t>(b)];
        Index cell = time_slot(blk);
        for (int d = 0; d < grid.domain.dim; ++d)
            cell = cell * grid.npts[static_cast<std::size_t>(d)] + spatial_slot(grid.domain, blk, d);
        cell *= comps;
        for (int c = 0; c < comps; ++c) buf[cell + c] = coeffs[modes.block_offset(b) + c];
    }

    for (int d = 0; d < grid.domain.dim; ++d) spatial_synthesize(buf, dims, grid, d);
    time_synthesize(buf, dims, grid);
    return buf;
}

Vector to_coeffs(const ModeSet& modes, const VectorRef& values, const GridSpec& grid) {
    require_compatible(grid, modes);
    if (values.size() != grid.value_count())
        throw ConfigError("spectral_core", "transform",
                          "grid value vector has length " + std::to_string(values.size()) +
                              ", grid holds " + std::to_string(grid.value_count()));
    const auto dims = tensor_dims(grid);
    const int comps = grid.domain.components();
    Vector buf = values;
    time_analyze(buf, dims, grid);
    for (int d = 0; d < grid.domain.dim; ++d) spatial_analyze(buf, dims, grid, d);

    Vector coeffs(modes.total_dim);
    for (Index b = 0; b < static_cast<Index>(modes.blocks.size()); ++b) {
        const ModeBlock& blk = modes.blocks[static_cast<std::size_t>(b)];
        Index cell = time_slot(blk);
        for (int d = 0; d < grid.domain.dim; ++d)
            cell = cell * grid.npts[static_cast<std::size_t>(d)] + spatial_slot(grid.domain, blk, d);
        cell *= comps;
        for (int c = 0; c < comps; ++c) coeffs[modes.block_offset(b) + c] = buf[cell + c];
    }
    return coeffs;
}

Real grid_norm(const GridSpec& grid, const VectorRef& values) {
    const int comps = grid.domain.components();
    Real acc = 0.0;
    for (Index p = 0; p < grid.point_count(); ++p) {
        const Real w = grid.weight_at(p);
        Real s = 0.0;
        for (int c = 0; c < comps; ++c) {
            const Real v = values[p * comps + c];
            s += v * v;
        }
        acc += w * s;
    }
    return std::sqrt(acc);
}

} // namespace hamflow
