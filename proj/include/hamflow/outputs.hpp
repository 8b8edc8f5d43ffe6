#ifndef HAMFLOW_OUTPUTS_HPP
#define HAMFLOW_OUTPUTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hamflow/types.hpp"

namespace hamflow {

struct RunConfig;

/// 17-significant-digit decimal, enough to reproduce the exact double.
std::string fmt17(Real v);

/// FNV-1a 64 over the raw config bytes, keyed with seed and command.
std::string config_hash(const std::string& text, std::uint64_t seed, const std::string& command);

/// Ensures the output directory exists; throws IoError when unwritable.
void ensure_output_dir(const std::string& dir);

/// manifest.json: config hash, versions, seed, command, written files.
void write_manifest(const RunConfig& config, const std::vector<std::string>& files);

void write_text_file(const std::string& path, const std::string& content);

} // namespace hamflow

#endif
