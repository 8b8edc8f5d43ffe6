#ifndef HAMFLOW_FIELD_HPP
#define HAMFLOW_FIELD_HPP

#include <iosfwd>
#include <memory>
#include <string>

#include "hamflow/domain.hpp"
#include "hamflow/types.hpp"

namespace hamflow {

/// A real field z(t,x) in R^{2m} stored as coefficients over a ModeSet.
/// The basis is orthonormal, so the coefficient l2 norm equals the
/// L2(S^1 x Omega) norm of the represented field.
struct SpectralField {
    std::shared_ptr<const ModeSet> modes;
    Vector coeffs;

    SpectralField() = default;
    SpectralField(std::shared_ptr<const ModeSet> ms, Vector c)
        : modes(std::move(ms)), coeffs(std::move(c)) {}

    static SpectralField zero(std::shared_ptr<const ModeSet> ms);

    Real norm() const { return coeffs.norm(); }
    bool empty() const { return !modes; }
};

/// Version tag of the deterministic mode ordering baked into files.
inline constexpr unsigned kOrderingVersion = 1;

/// Binary format: magic "HFSF0001", then a little-endian header
/// (ordering version, domain, truncation) and total_dim 8-byte floats.
void write_field(const std::string& path, const SpectralField& field);
SpectralField read_field(const std::string& path);

/// CSV export: one row per (mode, component) with mode labels.
void write_field_csv(const std::string& path, const SpectralField& field);

} // namespace hamflow

#endif
