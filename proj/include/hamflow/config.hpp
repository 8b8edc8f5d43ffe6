#ifndef HAMFLOW_CONFIG_HPP
#define HAMFLOW_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hamflow/homotopy.hpp"

namespace hamflow {

enum class Command { Spectrum, IndexCmd, Flow, Solve, Homotopy, Verify };

std::string to_string(Command c);
Command parse_command(const std::string& name);

/// Flat sectioned key = value file; # and ; start comments. Unknown or
/// duplicate keys are rejected with the offending key named.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_text(const std::string& text, const std::string& origin = "<text>");

    bool has(const std::string& key) const;
    std::string raw_text() const { return raw_; }

    std::string get_string(const std::string& key);
    std::string get_string(const std::string& key, const std::string& fallback);
    Real get_real(const std::string& key);
    Real get_real(const std::string& key, Real fallback);
    long get_int(const std::string& key);
    long get_int(const std::string& key, long fallback);
    std::vector<Real> get_reals(const std::string& key);  // space separated

    /// Throws ConfigError naming the first key that was never consumed.
    void reject_unknown() const;

private:
    struct Entry {
        std::string value;
        int line;
        bool consumed = false;
    };
    std::map<std::string, Entry> entries_;  // "section.key"
    std::string origin_;
    std::string raw_;

    Entry& lookup(const std::string& key);
};

/// Description of a constant symmetric pencil coefficient in a config:
/// scalar b (b*I), diagonal, or a full row-major 2m x 2m matrix.
struct PencilSpec {
    enum class Kind { Scalar, Diagonal, Full } kind = Kind::Scalar;
    Real scalar = 0.0;
    std::vector<Real> entries;

    MatrixField build(int m) const;
};

struct ForcingModeSpec {
    int k = 0;
    TimeParity parity = TimeParity::Constant;
    std::vector<int> n;
    int component = 0;
    Real amplitude = 0.0;
};

struct ForcingSpec {
    enum class Kind { None, Constant, Modes, Random } kind = Kind::None;
    std::vector<Real> constant;           // 2m entries
    std::vector<ForcingModeSpec> modes;
    Real random_norm = 1.0;

    SpectralField build(const std::shared_ptr<const ModeSet>& modes_ptr,
                        std::uint64_t seed) const;
};

struct ModelSpec {
    ModelKind kind = ModelKind::LinearForced;
    Real lipschitz = 0.0;
    PencilSpec b;          // linear_forced / saturating
    PencilSpec b1, b2;     // pinched
    int sign = -1;
    Real m2 = 0.0;
    std::vector<Real> center;
    ForcingSpec forcing;

    HamiltonianModel build(const std::shared_ptr<const ModeSet>& modes, std::uint64_t seed) const;
};

/// Everything one reproducible run needs. Strict parsing: any unknown key in
/// the file is a config error naming the key.
struct RunConfig {
    Command command = Command::Spectrum;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    std::string config_text;  // raw bytes, hashed into the manifest

    DomainSpec domain;
    int k_max = 0;
    Real spatial_cutoff = 0.0;
    Real oversample = 2.0;

    Real window_l_h = 0.0;

    ModelSpec model;

    ContinuationSchedule schedule;
    EngineSettings engine;

    // index/flow command inputs
    PencilSpec index_b, index_b2;
    std::string pencil_label = "B";
    int flow_steps = 20;

    // solve command inputs
    Real solve_eps = 0.0;
    Real solve_lambda = 1.0;

    int audit_samples = 2000;

    static RunConfig from_file(const std::string& path, Command command);
    static RunConfig from_text(const std::string& text, Command command,
                               const std::string& origin = "<text>");
};

} // namespace hamflow

#endif
