#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sturm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text; `offset` is the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation left the domain of an operation (log of a non-positive value, 1/0, overflow).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Problem file is malformed. `line` is 1-based, 0 when not tied to a line.
class ProblemFileError : public Error {
public:
    ProblemFileError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class MissingKey : public ProblemFileError {
public:
    explicit MissingKey(const std::string& key)
        : ProblemFileError("missing key '" + key + "'", 0), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// K or G not positive, or L not positive in strong mode.
class ValidationError : public Error {
public:
    enum class Kind { PositivityViolationK, PositivityViolationG, NegativeL, DegenerateInterval };
    ValidationError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

class IntegrationError : public Error {
public:
    using Error::Error;
};

class BracketError : public Error {
public:
    using Error::Error;
};

class OscillationMismatch : public Error {
public:
    OscillationMismatch(int expected, int found)
        : Error("eigenfunction has " + std::to_string(found) + " interior zeros, expected " +
                std::to_string(expected)),
          expected_(expected), found_(found) {}
    int expected() const noexcept { return expected_; }
    int found() const noexcept { return found_; }

private:
    int expected_;
    int found_;
};

class UnresolvedCluster : public Error {
public:
    UnresolvedCluster(const std::string& what, double location) : Error(what), location_(location) {}
    double location() const noexcept { return location_; }

private:
    double location_;
};

class OddBoundaryOrder : public Error {
public:
    OddBoundaryOrder(double endpoint, int order)
        : Error("boundary zero at " + std::to_string(endpoint) + " has odd order " +
                std::to_string(order)),
          order_(order) {}
    int order() const noexcept { return order_; }

private:
    int order_;
};

class DegenerateBlock : public Error {
public:
    using Error::Error;
};

class NoCertificate : public Error {
public:
    using Error::Error;
};

}  // namespace sturm
