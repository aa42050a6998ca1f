#pragma once

#include <stdexcept>
#include <string>

namespace colsim {

/// Raised when a configuration value or file is unusable.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Raised on malformed or incomplete record data during post-processing.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

inline void expects(bool condition, const char* message)
{
    if (!condition) {
        throw ContractViolation(message);
    }
}

} // namespace colsim
