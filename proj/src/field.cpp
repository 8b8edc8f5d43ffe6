#include "hamflow/field.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hamflow/errors.hpp"

namespace hamflow {

namespace {

constexpr char kMagic[8] = {'H', 'F', 'S', 'F', '0', '0', '0', '1'};

template <class T>
void put_le(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(raw, raw + sizeof(T));
    os.write(reinterpret_cast<const char*>(raw), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    unsigned char raw[sizeof(T)];
    is.read(reinterpret_cast<char*>(raw), sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(raw, raw + sizeof(T));
    T v;
    std::memcpy(&v, raw, sizeof(T));
    return v;
}

std::string fmt17(Real v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

SpectralField SpectralField::zero(std::shared_ptr<const ModeSet> ms) {
    Vector c = Vector::Zero(ms->total_dim);
    return SpectralField(std::move(ms), std::move(c));
}

void write_field(const std::string& path, const SpectralField& field) {
    if (field.empty())
        throw IoError("spectral_core", "write_field", "field has no mode set");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("spectral_core", "write_field", "cannot open " + path);
    const ModeSet& ms = *field.modes;
    os.write(kMagic, sizeof kMagic);
    put_le<std::uint32_t>(os, kOrderingVersion);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ms.domain.dim));
    put_le<std::uint32_t>(os, ms.domain.boundary == Boundary::Dirichlet ? 0u : 1u);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ms.domain.m));
    put_le<double>(os, ms.domain.period);
    for (Real L : ms.domain.lengths) put_le<double>(os, L);
    put_le<std::int64_t>(os, ms.k_max);
    put_le<double>(os, ms.spatial_cutoff);
    put_le<std::uint64_t>(os, static_cast<std::uint64_t>(ms.total_dim));
    for (Index i = 0; i < ms.total_dim; ++i) put_le<double>(os, field.coeffs[i]);
    if (!os) throw IoError("spectral_core", "write_field", "write failed for " + path);
}

SpectralField read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("spectral_core", "read_field", "cannot open " + path);
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw IoError("spectral_core", "read_field", path + " is not a spectral field file");
    const auto ordering = get_le<std::uint32_t>(is);
    if (ordering != kOrderingVersion)
        throw IoError("spectral_core", "read_field",
                      "unsupported ordering version " + std::to_string(ordering));
    DomainSpec d;
    d.dim = static_cast<int>(get_le<std::uint32_t>(is));
    d.boundary = get_le<std::uint32_t>(is) == 0 ? Boundary::Dirichlet : Boundary::Neumann;
    d.m = static_cast<int>(get_le<std::uint32_t>(is));
    d.period = get_le<double>(is);
    if (d.dim < 1 || d.dim > 16)
        throw IoError("spectral_core", "read_field", "corrupt header: dim");
    d.lengths.resize(static_cast<std::size_t>(d.dim));
    for (Real& L : d.lengths) L = get_le<double>(is);
    const auto k_max = get_le<std::int64_t>(is);
    const auto cutoff = get_le<double>(is);
    const auto total = get_le<std::uint64_t>(is);
    auto ms = std::make_shared<ModeSet>(enumerate_modes(d, static_cast<int>(k_max), cutoff));
    if (static_cast<std::uint64_t>(ms->total_dim) != total)
        throw IoError("spectral_core", "read_field",
                      "header total_dim " + std::to_string(total) +
                          " does not match enumerated " + std::to_string(ms->total_dim));
    Vector c(ms->total_dim);
    for (Index i = 0; i < ms->total_dim; ++i) c[i] = get_le<double>(is);
    if (!is) throw IoError("spectral_core", "read_field", "truncated file " + path);
    return SpectralField(std::move(ms), std::move(c));
}

void write_field_csv(const std::string& path, const SpectralField& field) {
    if (field.empty())
        throw IoError("spectral_core", "write_field_csv", "field has no mode set");
    std::ofstream os(path);
    if (!os) throw IoError("spectral_core", "write_field_csv", "cannot open " + path);
    const ModeSet& ms = *field.modes;
    os << "block,k,parity,n,mu,component,coefficient\n";
    for (Index b = 0; b < static_cast<Index>(ms.blocks.size()); ++b) {
        const ModeBlock& blk = ms.blocks[static_cast<std::size_t>(b)];
        std::ostringstream nlabel;
        for (std::size_t i = 0; i < blk.n.size(); ++i) {
            if (i) nlabel << ' ';
            nlabel << blk.n[i];
        }
        for (int c = 0; c < ms.domain.components(); ++c) {
            os << b << ',' << blk.k << ',' << to_string(blk.parity) << ',' << nlabel.str()
               << ',' << fmt17(blk.mu) << ',' << c << ','
               << fmt17(field.coeffs[ms.block_offset(b) + c]) << '\n';
        }
    }
    if (!os) throw IoError("spectral_core", "write_field_csv", "write failed for " + path);
}

} // namespace hamflow
