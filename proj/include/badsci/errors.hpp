#pragma once

#include <stdexcept>
#include <string>

namespace badsci {

// Input that cannot be interpreted (bad JSON, dimension mismatch, corrupt checkpoint).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Hypercube enumeration refused because 2^n exceeds the configured cap.
struct DimensionCapError : std::runtime_error {
    explicit DimensionCapError(const std::string& what) : std::runtime_error(what) {}
};

// Search refused because the combination count exceeds the budget and --force was not given.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive-precision comparison hit the precision cap without separating two
// values whose canonical forms differ. Raise the cap; never silently tie.
struct PrecisionExhausted : std::runtime_error {
    explicit PrecisionExhausted(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace badsci
