#pragma once

#include <stdexcept>
#include <string>

namespace trm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by the config reader; carries the offending line for diagnostics.
struct ConfigError : Error {
    ConfigError(const std::string& msg, int line_no = -1)
        : Error(line_no >= 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg),
          line(line_no) {}
    int line;
};

// Raised when a mesh/topology consistency check fails mid-run.
struct InvariantError : Error {
    using Error::Error;
};

} // namespace trm
