#pragma once

#include <stdexcept>
#include <string>

namespace dioph {

// Malformed configuration or parameters outside an operation's domain.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Memory caps, table sizes and similar resource limits.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A prime table does not reach far enough for the requested range.
class TableTooSmall : public ResourceError {
public:
    using ResourceError::ResourceError;
};

// A numerical procedure could not reach the requested accuracy. Carries the
// best estimate so callers can still report it.
class ToleranceError : public std::runtime_error {
public:
    ToleranceError(const std::string& what, double estimate, double achieved_error)
        : std::runtime_error(what), estimate_(estimate), achieved_(achieved_error) {}

    double estimate() const noexcept { return estimate_; }
    double achieved_error() const noexcept { return achieved_; }

private:
    double estimate_;
    double achieved_;
};

}  // namespace dioph
