#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mcdds {

/// A computation produced (or was handed) a non-finite value.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem or stream failure while reading inputs or writing outputs.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One violated constraint, addressed by its dotted JSON path (e.g. "g2.a").
struct ConfigIssue {
    std::string path;
    std::string message;
};

/// Carries every violation found while validating a configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);

    [[nodiscard]] const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

}  // namespace mcdds
