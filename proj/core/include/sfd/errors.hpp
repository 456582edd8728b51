#pragma once

#include <stdexcept>
#include <string>

namespace sfd {

/// A criterion hit a configuration it cannot evaluate: duplicate points for a
/// distance criterion, repeated column values for MaxPro, a constant column
/// for correlations.
class DegenerateDesignError : public std::runtime_error {
public:
    explicit DegenerateDesignError(const std::string& what) : std::runtime_error(what) {}
};

/// Covariance factorization failed even after jitter escalation, or the
/// likelihood search never found a finite objective.
class FitFailure : public std::runtime_error {
public:
    explicit FitFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Unknown simulator or design-method name.
class NotFoundError : public std::runtime_error {
public:
    explicit NotFoundError(const std::string& what) : std::runtime_error(what) {}
};

/// A benchmark or CLI configuration that cannot be run as requested.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sfd
