#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hetqa {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A required input file could not be opened or an output could not be written.
class IoError : public Error {
public:
    IoError(std::string path, const std::string& what)
        : Error(what + ": " + path), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Malformed record in a line-oriented input. Line numbers are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input that parses but violates a data-model invariant (duplicate ids, bad dims, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Failure talking to an external service after retries were exhausted.
class RemoteError : public Error {
public:
    using Error::Error;
};

}  // namespace hetqa
