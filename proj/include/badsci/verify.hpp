// Named verification suites over the library: golden objective values,
// partition counts, the lifting chain, tree-formula equivalence, candidate-row
// counts, desk-scale exhaustive searches, the subset-norm bound, lp values,
// the wide-matrix bound, engine invariances, and the structure condition.
// Each check reports pass/fail with a one-line detail.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace badsci {

struct VerifyOptions {
    int max_n = 0;          // 0 = suite default
    int threads = 1;
    std::uint64_t seed = 1;
    bool extended = false;  // also run the flagged long searches (4x4)
    std::string scratch_dir;  // for checkpoint round-trip checks; empty = temp
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<std::string> verify_suite_names();

// Runs one suite; throws std::invalid_argument for unknown names.
std::vector<CheckResult> run_verify_suite(const std::string& suite, const VerifyOptions& opts = {});

}  // namespace badsci
