#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace phonon_gauge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sites coincide, a dimension or spacing is non-positive, or a layout is malformed.
class InvalidGeometry : public Error {
public:
    using Error::Error;
};

/// Argument outside the supported numerical range.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Physically inconsistent combination of inputs (missing gradient, off-resonant drive, mode mismatch).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Requested Hilbert space exceeds the configured capacity.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// A closed path crosses a vanishing bond.
class BrokenCycle : public Error {
public:
    using Error::Error;
};

/// Time integration lost unitarity beyond the abort threshold.
class IntegrationFailure : public Error {
public:
    using Error::Error;
};

/// One schema violation in a configuration document.
struct ConfigIssue {
    std::string path;
    std::string reason;
};

/// Configuration document failed validation; carries every violation found.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);

    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

}  // namespace phonon_gauge
