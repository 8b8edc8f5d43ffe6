#ifndef HAMFLOW_RUN_HPP
#define HAMFLOW_RUN_HPP

#include <iosfwd>

#include "hamflow/config.hpp"

namespace hamflow {

/// Exit status taxonomy: 0 success, 1 config error, 2 monitor violation,
/// 3 solver failure.
int exit_code_for(const std::exception& e);

/// Dispatches the configured command, writes its artifact files plus a
/// manifest, and returns the exit status. Diagnostics go to `log`.
int run_config(const RunConfig& config, std::ostream& log);

} // namespace hamflow

#endif
