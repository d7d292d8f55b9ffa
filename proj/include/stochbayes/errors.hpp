#pragma once

#include <stdexcept>
#include <string>

namespace stochbayes {

/// Netlist text that could not be parsed; message names the offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

/// A structurally invalid netlist was handed to an operation that requires a
/// validated one.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation produced a degenerate result (all-zero counters, zero
/// denominator): the inputs are formally valid but the answer is undefined.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace stochbayes
