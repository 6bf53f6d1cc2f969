#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ismnet {

/// Base class for every structured failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input record; `line()` is the zero-based record index.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A simplex layer that the complex does not carry.
class MissingLayerError : public Error {
public:
    explicit MissingLayerError(int order)
        : Error("simplicial complex has no layer of order " + std::to_string(order)),
          order_(order) {}

    int order() const noexcept { return order_; }

private:
    int order_;
};

/// A layer would grow past the configured simplex cap.
class CapExceededError : public Error {
public:
    CapExceededError(int order, std::size_t count, std::size_t cap)
        : Error("layer " + std::to_string(order) + " exceeds simplex cap (" +
                std::to_string(count) + " > " + std::to_string(cap) + ")"),
          order_(order), count_(count) {}

    int order() const noexcept { return order_; }
    std::size_t count() const noexcept { return count_; }

private:
    int order_;
    std::size_t count_;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration (maps to CLI exit code 3).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ismnet
