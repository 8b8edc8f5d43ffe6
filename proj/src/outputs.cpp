#include "hamflow/outputs.hpp"

#include <Eigen/Core>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "hamflow/config.hpp"
#include "hamflow/errors.hpp"

namespace hamflow {

std::string fmt17(Real v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string config_hash(const std::string& text, std::uint64_t seed, const std::string& command) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](unsigned char c) {
        h ^= c;
        h *= 1099511628211ULL;
    };
    for (unsigned char c : text) mix(c);
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
    for (unsigned char c : command) mix(c);
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void ensure_output_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw IoError("cli", "emit_outputs", "cannot create output directory " + dir);
    // probe writability
    const std::filesystem::path probe = std::filesystem::path(dir) / ".write_probe";
    std::ofstream os(probe);
    if (!os) throw IoError("cli", "emit_outputs", "output directory " + dir + " is not writable");
    os.close();
    std::filesystem::remove(probe, ec);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cli", "emit_outputs", "cannot open " + path);
    os << content;
    if (!os) throw IoError("cli", "emit_outputs", "write failed for " + path);
}

void write_manifest(const RunConfig& config, const std::vector<std::string>& files) {
    nlohmann::json j;
    j["config_hash"] = config_hash(config.config_text, config.seed, to_string(config.command));
    j["command"] = to_string(config.command);
    j["seed"] = config.seed;
    j["ordering_version"] = 1;
    j["versions"] = {{"hamflow", "0.1.0"},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                   std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)}};
    j["files"] = files;
    write_text_file(config.output_dir + "/manifest.json", j.dump(2) + "\n");
}

} // namespace hamflow
