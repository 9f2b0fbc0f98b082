#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace orbilat {

// Input data fails a documented precondition (bad Eisenstein polynomial,
// p = 2, non-hermitian Gram matrix, ...).
struct SpecError : std::invalid_argument {
    explicit SpecError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Working precision cannot resolve the quantity (singular-at-precision
// matrix, zero detection, denominator overflow).
struct PrecisionError : std::runtime_error {
    explicit PrecisionError(const std::string& msg) : std::runtime_error(msg) {}
};

// A division that the theory guarantees exact turned out inexact; always an
// implementation or input bug, never recoverable.
struct InexactDivision : std::logic_error {
    explicit InexactDivision(const std::string& msg) : std::logic_error(msg) {}
};

// Enumeration would exceed the configured cap; carries the size that would
// have been required.
struct CapExceeded : std::runtime_error {
    CapExceeded(const std::string& msg, std::size_t req)
        : std::runtime_error(msg + " (required " + std::to_string(req) + ")"), required(req) {}
    std::size_t required;
};

struct NotRegularSemisimple : std::runtime_error {
    explicit NotRegularSemisimple(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotAdjointStable : std::runtime_error {
    explicit NotAdjointStable(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace orbilat
