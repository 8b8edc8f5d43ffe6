#include "hamflow/config.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "hamflow/errors.hpp"

namespace hamflow {

std::string to_string(Command c) {
    switch (c) {
        case Command::Spectrum: return "spectrum";
        case Command::IndexCmd: return "index";
        case Command::Flow: return "flow";
        case Command::Solve: return "solve";
        case Command::Homotopy: return "homotopy";
        default: return "verify";
    }
}

Command parse_command(const std::string& name) {
    if (name == "spectrum") return Command::Spectrum;
    if (name == "index") return Command::IndexCmd;
    if (name == "flow") return Command::Flow;
    if (name == "solve") return Command::Solve;
    if (name == "homotopy") return Command::Homotopy;
    if (name == "verify") return Command::Verify;
    throw ConfigError("cli", "run_config", "unknown command '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cli", "run_config", "cannot open config file " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_text(buf.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
    ConfigFile cf;
    cf.origin_ = origin;
    cf.raw_ = text;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("cli", "run_config",
                                  origin + ":" + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("cli", "run_config",
                              origin + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("cli", "run_config",
                              origin + ":" + std::to_string(lineno) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        if (cf.entries_.count(key))
            throw ConfigError("cli", "run_config",
                              origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                                  "'");
        cf.entries_[key] = Entry{value, lineno, false};
    }
    return cf;
}

bool ConfigFile::has(const std::string& key) const { return entries_.count(key) > 0; }

ConfigFile::Entry& ConfigFile::lookup(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end())
        throw ConfigError("cli", "run_config", "missing required key '" + key + "'");
    it->second.consumed = true;
    return it->second;
}

std::string ConfigFile::get_string(const std::string& key) { return lookup(key).value; }

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) {
    return has(key) ? get_string(key) : fallback;
}

Real ConfigFile::get_real(const std::string& key) {
    const Entry& e = lookup(key);
    try {
        std::size_t pos = 0;
        const Real v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cli", "run_config",
                          "key '" + key + "' (line " + std::to_string(e.line) +
                              "): not a real number: '" + e.value + "'");
    }
}

Real ConfigFile::get_real(const std::string& key, Real fallback) {
    return has(key) ? get_real(key) : fallback;
}

long ConfigFile::get_int(const std::string& key) {
    const Entry& e = lookup(key);
    try {
        std::size_t pos = 0;
        const long v = std::stol(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cli", "run_config",
                          "key '" + key + "' (line " + std::to_string(e.line) +
                              "): not an integer: '" + e.value + "'");
    }
}

long ConfigFile::get_int(const std::string& key, long fallback) {
    return has(key) ? get_int(key) : fallback;
}

std::vector<Real> ConfigFile::get_reals(const std::string& key) {
    const Entry& e = lookup(key);
    std::istringstream is(e.value);
    std::vector<Real> out;
    std::string tok;
    while (is >> tok) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("cli", "run_config",
                              "key '" + key + "': not a real number: '" + tok + "'");
        }
    }
    return out;
}

void ConfigFile::reject_unknown() const {
    for (const auto& [key, entry] : entries_)
        if (!entry.consumed)
            throw ConfigError("cli", "run_config",
                              "unknown key '" + key + "' (line " + std::to_string(entry.line) +
                                  ") in " + origin_);
}

MatrixField PencilSpec::build(int m) const {
    const int c = 2 * m;
    switch (kind) {
        case Kind::Scalar:
            return MatrixField::scalar(scalar, m);
        case Kind::Diagonal: {
            if (static_cast<int>(entries.size()) != c)
                throw ConfigError("cli", "run_config", "diagonal pencil needs 2m entries");
            Matrix M = Matrix::Zero(c, c);
            for (int i = 0; i < c; ++i) M(i, i) = entries[static_cast<std::size_t>(i)];
            return MatrixField::constant(std::move(M));
        }
        case Kind::Full: {
            if (static_cast<int>(entries.size()) != c * c)
                throw ConfigError("cli", "run_config", "full pencil needs (2m)^2 entries");
            Matrix M(c, c);
            for (int i = 0; i < c; ++i)
                for (int j = 0; j < c; ++j)
                    M(i, j) = entries[static_cast<std::size_t>(i * c + j)];
            MatrixField f = MatrixField::constant(std::move(M));
            f.require_symmetric(1e-12);
            return f;
        }
    }
    throw ConfigError("cli", "run_config", "bad pencil kind");
}

SpectralField ForcingSpec::build(const std::shared_ptr<const ModeSet>& modes_ptr,
                                 std::uint64_t seed) const {
    if (kind == Kind::None) return SpectralField();
    const ModeSet& ms = *modes_ptr;
    const int comps = ms.domain.components();
    if (kind == Kind::Constant) {
        if (static_cast<int>(constant.size()) != comps)
            throw ConfigError("cli", "run_config", "forcing_constant needs 2m entries");
        const GridSpec grid = default_grid(ms);
        Vector values(grid.value_count());
        for (Index p = 0; p < grid.point_count(); ++p)
            for (int c = 0; c < comps; ++c)
                values[p * comps + c] = constant[static_cast<std::size_t>(c)];
        return SpectralField(modes_ptr, to_coeffs(ms, values, grid));
    }
    if (kind == Kind::Modes) {
        Vector coeffs = Vector::Zero(ms.total_dim);
        for (const ForcingModeSpec& spec : modes) {
            bool found = false;
            for (Index b = 0; b < static_cast<Index>(ms.blocks.size()); ++b) {
                const ModeBlock& blk = ms.blocks[static_cast<std::size_t>(b)];
                if (blk.k == spec.k && blk.parity == spec.parity && blk.n == spec.n) {
                    if (spec.component < 0 || spec.component >= comps)
                        throw ConfigError("cli", "run_config", "forcing mode component out of range");
                    coeffs[ms.block_offset(b) + spec.component] += spec.amplitude;
                    found = true;
                    break;
                }
            }
            if (!found)
                throw ConfigError("cli", "run_config",
                                  "forcing mode (k=" + std::to_string(spec.k) +
                                      ") not present in the truncation");
        }
        return SpectralField(modes_ptr, std::move(coeffs));
    }
    // Random
    std::mt19937_64 rng(seed + 0x9e3779b9ULL);
    std::normal_distribution<Real> gauss(0.0, 1.0);
    Vector coeffs(ms.total_dim);
    for (Index i = 0; i < ms.total_dim; ++i) coeffs[i] = gauss(rng);
    const Real n = coeffs.norm();
    if (n > 0) coeffs *= random_norm / n;
    return SpectralField(modes_ptr, std::move(coeffs));
}

HamiltonianModel ModelSpec::build(const std::shared_ptr<const ModeSet>& modes,
                                  std::uint64_t seed) const {
    const int m = modes->domain.m;
    SpectralField f = forcing.build(modes, seed);
    switch (kind) {
        case ModelKind::LinearForced:
            return HamiltonianModel::linear_forced(b.build(m), std::move(f), lipschitz);
        case ModelKind::Saturating: {
            SaturatingParams p;
            p.m2 = m2;
            p.sign = sign;
            if (!center.empty()) {
                p.center = Vector(static_cast<Index>(center.size()));
                for (std::size_t i = 0; i < center.size(); ++i)
                    p.center[static_cast<Index>(i)] = center[i];
            }
            HamiltonianModel mod = HamiltonianModel::saturating(b.build(m), std::move(p), lipschitz);
            mod.forcing = std::move(f);
            return mod;
        }
        case ModelKind::Pinched:
            return HamiltonianModel::pinched(b1.build(m), b2.build(m), std::move(f), lipschitz);
    }
    throw ConfigError("cli", "run_config", "bad model kind");
}

namespace {

PencilSpec parse_pencil(ConfigFile& cf, const std::string& prefix) {
    PencilSpec p;
    const std::string kind = cf.get_string(prefix + "_kind", "scalar");
    if (kind == "scalar") {
        p.kind = PencilSpec::Kind::Scalar;
        p.scalar = cf.get_real(prefix + "_value");
    } else if (kind == "diag") {
        p.kind = PencilSpec::Kind::Diagonal;
        p.entries = cf.get_reals(prefix + "_diag");
    } else if (kind == "full") {
        p.kind = PencilSpec::Kind::Full;
        p.entries = cf.get_reals(prefix + "_full");
    } else {
        throw ConfigError("cli", "run_config",
                          "key '" + prefix + "_kind': expected scalar|diag|full, got '" + kind +
                              "'");
    }
    return p;
}

TimeParity parse_parity(const std::string& s) {
    if (s == "const") return TimeParity::Constant;
    if (s == "cos") return TimeParity::Cos;
    if (s == "sin") return TimeParity::Sin;
    throw ConfigError("cli", "run_config", "bad time parity '" + s + "' (const|cos|sin)");
}

ForcingSpec parse_forcing(ConfigFile& cf, int dim) {
    ForcingSpec f;
    const std::string kind = cf.get_string("model.forcing_kind", "none");
    if (kind == "none") {
        f.kind = ForcingSpec::Kind::None;
    } else if (kind == "constant") {
        f.kind = ForcingSpec::Kind::Constant;
        f.constant = cf.get_reals("model.forcing_constant");
    } else if (kind == "modes") {
        f.kind = ForcingSpec::Kind::Modes;
        const long count = cf.get_int("model.forcing_mode_count");
        for (long i = 1; i <= count; ++i) {
            const std::string raw = cf.get_string("model.forcing_mode_" + std::to_string(i));
            std::istringstream is(raw);
            ForcingModeSpec spec;
            std::string parity;
            if (!(is >> spec.k >> parity))
                throw ConfigError("cli", "run_config", "forcing mode entry: '" + raw + "'");
            spec.parity = parse_parity(parity);
            spec.n.resize(static_cast<std::size_t>(dim));
            for (int d = 0; d < dim; ++d)
                if (!(is >> spec.n[static_cast<std::size_t>(d)]))
                    throw ConfigError("cli", "run_config", "forcing mode entry: '" + raw + "'");
            if (!(is >> spec.component >> spec.amplitude))
                throw ConfigError("cli", "run_config", "forcing mode entry: '" + raw + "'");
            f.modes.push_back(std::move(spec));
        }
    } else if (kind == "random") {
        f.kind = ForcingSpec::Kind::Random;
        f.random_norm = cf.get_real("model.forcing_random_norm");
    } else {
        throw ConfigError("cli", "run_config",
                          "key 'model.forcing_kind': expected none|constant|modes|random");
    }
    return f;
}

} // namespace

RunConfig RunConfig::from_text(const std::string& text, Command command,
                               const std::string& origin) {
    ConfigFile cf = ConfigFile::parse_text(text, origin);
    RunConfig rc;
    rc.command = command;
    rc.config_text = text;

    if (cf.has("command")) {
        const Command file_cmd = parse_command(cf.get_string("command"));
        if (file_cmd != command)
            throw ConfigError("cli", "run_config",
                              "config names command '" + to_string(file_cmd) +
                                  "' but '" + to_string(command) + "' was requested");
    }
    rc.seed = static_cast<std::uint64_t>(cf.get_int("seed", 0));
    rc.output_dir = cf.get_string("output.dir", "out");

    if (cf.has("domain.dim")) {
        rc.domain.dim = static_cast<int>(cf.get_int("domain.dim"));
        for (int i = 1; i <= rc.domain.dim; ++i)
            rc.domain.lengths.push_back(cf.get_real("domain.length_" + std::to_string(i)));
        const std::string bc = cf.get_string("domain.boundary", "dirichlet");
        if (bc == "dirichlet")
            rc.domain.boundary = Boundary::Dirichlet;
        else if (bc == "neumann")
            rc.domain.boundary = Boundary::Neumann;
        else
            throw ConfigError("cli", "run_config",
                              "key 'domain.boundary': expected dirichlet|neumann");
        rc.domain.period = cf.get_real("domain.period");
        rc.domain.m = static_cast<int>(cf.get_int("domain.m", 1));
        rc.domain.validate();

        rc.k_max = static_cast<int>(cf.get_int("truncation.k_max"));
        rc.spatial_cutoff = cf.get_real("truncation.spatial_cutoff");
        rc.oversample = cf.get_real("truncation.oversample", 2.0);
        if (rc.oversample < 1.0)
            throw ConfigError("cli", "run_config", "truncation.oversample must be >= 1");
    }

    rc.window_l_h = cf.get_real("window.l_h", 0.0);

    if (cf.has("model.kind")) {
        const std::string kind = cf.get_string("model.kind");
        if (kind == "linear_forced")
            rc.model.kind = ModelKind::LinearForced;
        else if (kind == "saturating")
            rc.model.kind = ModelKind::Saturating;
        else if (kind == "pinched")
            rc.model.kind = ModelKind::Pinched;
        else
            throw ConfigError("cli", "run_config",
                              "key 'model.kind': expected linear_forced|saturating|pinched");
        rc.model.lipschitz = cf.get_real("model.lipschitz");
        if (rc.model.kind == ModelKind::Pinched) {
            rc.model.b1 = parse_pencil(cf, "model.b1");
            rc.model.b2 = parse_pencil(cf, "model.b2");
        } else {
            rc.model.b = parse_pencil(cf, "model.b");
        }
        if (rc.model.kind == ModelKind::Saturating) {
            rc.model.m2 = cf.get_real("model.m2");
            rc.model.sign = static_cast<int>(cf.get_int("model.sign", -1));
            if (cf.has("model.center")) rc.model.center = cf.get_reals("model.center");
        }
        rc.model.forcing = parse_forcing(cf, rc.domain.dim);
    }

    if (cf.has("schedule.mode")) {
        const std::string mode = cf.get_string("schedule.mode");
        if (mode == "regularized")
            rc.schedule.mode = HomotopyMode::Regularized;
        else if (mode == "pinched")
            rc.schedule.mode = HomotopyMode::Pinched;
        else
            throw ConfigError("cli", "run_config",
                              "key 'schedule.mode': expected regularized|pinched");
        rc.schedule.eps0 = cf.get_real("schedule.eps0", 0.0);
        rc.schedule.eps_levels = static_cast<int>(cf.get_int("schedule.eps_levels", 1));
        rc.schedule.lambda_steps = static_cast<int>(cf.get_int("schedule.lambda_steps", 20));
        rc.schedule.ball_radius_factor = cf.get_real("schedule.ball_radius_factor", 2.0);
        rc.schedule.compute_degree = cf.get_int("schedule.compute_degree", 1) != 0;
        rc.schedule.gap_segment_samples =
            static_cast<int>(cf.get_int("schedule.gap_samples", 21));
        rc.schedule.inner_fraction_floor = cf.get_real("schedule.inner_fraction_floor", 1e-3);
    }

    rc.engine.reduction.outer_tol = cf.get_real("solver.outer_tol", 1e-12);
    rc.engine.reduction.outer_cap = static_cast<int>(cf.get_int("solver.outer_cap", 10000));
    rc.engine.reduction.newton_tol = cf.get_real("solver.newton_tol", 1e-10);
    rc.engine.reduction.newton_cap = static_cast<int>(cf.get_int("solver.newton_cap", 50));
    rc.engine.reduction.newton_halvings =
        static_cast<int>(cf.get_int("solver.newton_halvings", 20));
    rc.engine.reduction.dedup_radius = cf.get_real("solver.dedup_radius", 1e-6);
    rc.engine.residual_tol = cf.get_real("solver.residual_tol", 1e-8);
    rc.engine.extra_starts = static_cast<int>(cf.get_int("solver.extra_starts", 4));
    rc.engine.max_step_halvings = static_cast<int>(cf.get_int("solver.max_step_halvings", 6));
    rc.engine.degree.starts = static_cast<int>(cf.get_int("solver.degree_starts", 24));
    rc.engine.degree.boundary_samples =
        static_cast<int>(cf.get_int("solver.boundary_samples", 64));
    rc.engine.degree.winding_samples =
        static_cast<int>(cf.get_int("solver.winding_samples", 512));
    rc.engine.seed = rc.seed;
    rc.engine.degree.seed = rc.seed;
    rc.audit_samples = static_cast<int>(cf.get_int("solver.audit_samples", 2000));

    if (cf.has("index.b_kind") || cf.has("index.b_value")) {
        rc.index_b = parse_pencil(cf, "index.b");
        rc.pencil_label = cf.get_string("index.label", "B");
        if (cf.has("index.b2_kind") || cf.has("index.b2_value"))
            rc.index_b2 = parse_pencil(cf, "index.b2");
        rc.flow_steps = static_cast<int>(cf.get_int("index.flow_steps", 20));
    }

    rc.solve_eps = cf.get_real("solve.eps", 0.0);
    rc.solve_lambda = cf.get_real("solve.lambda", 1.0);

    cf.reject_unknown();
    return rc;
}

RunConfig RunConfig::from_file(const std::string& path, Command command) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cli", "run_config", "cannot open config file " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_text(buf.str(), command, path);
}

} // namespace hamflow
