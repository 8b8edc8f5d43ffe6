#ifndef HAMFLOW_ERRORS_HPP
#define HAMFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hamflow {

/// Base error. Every throw site names the module and operation that raised it
/// so CLI diagnostics can point at the failing piece.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string op, const std::string& message)
        : std::runtime_error("[" + module + "." + op + "] " + message),
          module_(std::move(module)),
          op_(std::move(op)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& op() const noexcept { return op_; }

private:
    std::string module_;
    std::string op_;
};

/// Invalid configuration, bad input file, incompatible dimensions. Exit code 1.
class ConfigError : public Error {
    using Error::Error;
};

/// A stated precondition / hypothesis of an operation failed (order violation,
/// gap certificate refused, mode/model mismatch). Exit code 1.
class PreconditionError : public Error {
    using Error::Error;
};

/// eps*I + L - B singular on a block; message names the block and eigenvalue.
class SingularOperatorError : public Error {
    using Error::Error;
};

/// Two finest truncation levels disagree on the relative index.
class NonStabilizedError : public Error {
    using Error::Error;
};

/// Bisection could not separate two spectral-flow crossings at resolution 1e-10.
class UnresolvedCrossingError : public Error {
    using Error::Error;
};

/// Outer fixed-point iteration diverged (increments grew repeatedly).
class DivergenceError : public Error {
    using Error::Error;
};

/// Newton / continuation failure after retries. Exit code 3.
class SolverError : public Error {
    using Error::Error;
};

/// Runtime monitor violated (a priori bound broken). Exit code 2.
class MonitorError : public Error {
    using Error::Error;
};

/// Filesystem trouble writing artifacts. Exit code 1.
class IoError : public Error {
    using Error::Error;
};

} // namespace hamflow

#endif
