#pragma once

#include <stdexcept>
#include <string>

namespace eegbench {

// Base for all library failures; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Text that does not parse. Carries the 1-based line number when known.
class MalformedInputError : public Error {
public:
    MalformedInputError(const std::string& what, long line = -1)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

// Shapes that do not agree (ragged rows, dimension mismatches, empty inputs).
class StructuralError : public Error {
public:
    using Error::Error;
};

// Argument outside the operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// A cache or model file written by an incompatible version, or tampered with.
class VersionError : public Error {
public:
    using Error::Error;
};

// Invalid configuration; `field` names the offending key path.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace eegbench
