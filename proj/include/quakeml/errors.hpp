#pragma once

#include <stdexcept>
#include <string>

namespace quakeml {

// Raised when an input violates a documented precondition (bad coordinates,
// malformed config values, unsorted streams, ...).
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised when there is not enough data to perform an operation
// (fewer than 4 triggers, too few calibration replications, ...).
struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by file ingestion with a 1-based line number for diagnostics.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t line_number)
        : std::runtime_error(msg + " (line " + std::to_string(line_number) + ")"),
          line(line_number) {}
    std::size_t line;
};

}  // namespace quakeml
