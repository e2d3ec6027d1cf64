#pragma once

#include <stdexcept>
#include <string>

namespace ph {

// Thrown for precondition violations (bad parameters, out-of-range values).
// CLI maps this to exit code 2.
struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Thrown when an input exceeds a configured capacity cap (point counts,
// grid dims). CLI exit code 3.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file. Carries the 1-based line number when known.
struct ParseError : std::runtime_error {
    long line = 0;
    ParseError(const std::string& msg, long line_no)
        : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// A data-structure invariant failed to hold. CLI exit code 4.
struct InvariantViolation : std::logic_error {
    explicit InvariantViolation(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace ph
