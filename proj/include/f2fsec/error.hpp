#pragma once

#include <stdexcept>
#include <string>

namespace f2fsec {

// Base for every failure raised by the core library. The C API maps the
// subclasses onto status codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class CycleError : public Error {
public:
    explicit CycleError(std::string gate)
        : Error("combinational cycle through gate '" + gate + "'"), gate_(std::move(gate)) {}

    const std::string& gate() const noexcept { return gate_; }

private:
    std::string gate_;
};

// Wrong shapes, widths, or interfaces handed to an operation.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class LegalizationError : public Error {
public:
    using Error::Error;
};

class KeyError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class AttackError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace f2fsec
