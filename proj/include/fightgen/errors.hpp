#pragma once

#include <stdexcept>
#include <string>

namespace fightgen {

/// Bad arguments to an operation (unknown ids, empty inputs, malformed files).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A loaded object breaks one of its own invariants.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A structure could not be assembled from otherwise valid parts.
class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario file problems. Carries the offending field and line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", field '" + field + "': " + what),
          field_(field),
          line_(line) {}

    const std::string& field() const { return field_; }
    int line() const { return line_; }

private:
    std::string field_;
    int line_;
};

}  // namespace fightgen
