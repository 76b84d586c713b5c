// Structure-restricted exhaustive optimization: every row of an optimal matrix
// is a normalized sum of hypercube vertices, so for small n the full optimum
// is found by enumerating all m-combinations of the deduplicated candidate
// rows and comparing objectives exactly.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "badsci/eval.hpp"
#include "badsci/matrix.hpp"

namespace badsci {

struct CandidateRowSet {
    int n = 0;
    std::vector<CanonicalRow> rows;  // sorted, no zero rows, unique up to sign
    // provenance: raw >= nonzero >= unique >= |rows|
    std::uint64_t raw_subsets = 0;      // subsets enumerated
    std::uint64_t nonzero_subsets = 0;  // subsets with a nonzero vertex sum
    std::uint64_t unique_rows = 0;      // distinct unit rows (sign kept)
    std::uint64_t antipode_free = 0;    // enumeration mode marker (0 = full)
    std::string hash;                   // stable content hash, hex

    std::uint64_t unique_up_to_sign() const { return rows.size(); }
};

// Enumerates vertex-subset sums and reduces them to candidate rows. Full mode
// walks all 2^(2^n) subsets; antipode-free mode walks the 3^(2^(n-1)) per-pair
// patterns {skip, +rep, -rep}, which produces the identical row set. n <= 4.
CandidateRowSet candidate_rows(int n, bool antipode_free = false);

struct SearchOptions {
    int threads = 1;
    std::uint64_t budget = 1'000'000'000;  // refuse larger searches unless forced
    bool force = false;
    std::string checkpoint_path;
    bool resume = false;
    std::uint64_t block_size = 0;   // 0 = auto
    std::uint64_t max_blocks = 0;   // 0 = run to completion (used to simulate interruption)
    bool antipode_free = false;     // candidate generation mode
    std::uint64_t maximizer_cap = 1'000'000;
    bool progress = false;          // progress lines on stderr
};

struct SearchState {
    int m = 0, n = 0;
    std::string candidate_hash;
    std::uint64_t total_combinations = 0;
    std::uint64_t cursor = 0;   // combinations [0, cursor) fully merged
    std::uint64_t checked = 0;  // == cursor
    SurdValue best_beta;
    double best_approx = 0.0;
    // row-index tuples (into the sorted candidate list) achieving best_beta
    // exactly, in enumeration order, capped at maximizer_cap
    std::vector<std::vector<std::uint32_t>> best_tuples;
    std::uint64_t maximizer_count = 0;  // including tuples beyond the cap
    bool complete = false;
    double elapsed_seconds = 0.0;

    std::string to_json(bool pretty = false) const;
};

// Evaluates beta exactly for every m-combination of candidate rows (unordered;
// row permutations cannot change the objective) and returns the exact maximum
// with all maximizing combinations. Deterministic for any thread count.
// Checkpoints are written at merged-block boundaries when a path is given;
// resume refuses a checkpoint whose candidate hash does not match.
SearchState exhaustive_search(int m, int n, const SearchOptions& opts = {});

Matrix matrix_from_tuple(const CandidateRowSet& rows, const std::vector<std::uint32_t>& tuple);

struct IterateResult {
    Matrix matrix;
    std::vector<BetaResult> trace;  // objective after each replacement (index 0 = input)
    int iterations = 0;
    bool fixed_point = false;
};

// Repeatedly replaces each row by the normalized sum over U_i (the positive
// half of its winner set; zero-dot vertices contribute the lexicographically
// larger of {x, -x}), re-evaluating until the matrix stops changing or
// max_iters is hit. Rows with empty W_i (or a vanishing sum) are kept
// unchanged. The objective trace is nondecreasing.
IterateResult structure_iterate(const Matrix& a, int max_iters = 100,
                                const EvalOptions& eval_opts = {});

struct RowStructureReport {
    int row = 0;
    std::uint64_t wi_size = 0;
    bool passes = false;     // a_i == +- normalized sum over U_i
    double residual = 0.0;   // min over sign of ||a_i -+ s||_2
};

struct StructureReport {
    std::vector<RowStructureReport> rows;
    bool all_nonempty_pass = false;
};

// Necessary optimality condition check, exact for integer-form rows and within
// 1e-9 for float rows.
StructureReport check_structure(const Matrix& a, const EvalOptions& eval_opts = {});

struct SubsetNormResult {
    int n = 0;
    std::uint64_t max_norm_sq = 0;
    std::uint64_t maximizer_count = 0;
    bool maximizers_all_half_size = false;    // every maximizer has 2^(n-1) vertices
    bool maximizers_antipode_free = false;    // no maximizer contains an antipodal pair
    bool half_cubes_attain = false;           // all 2n fixed-coordinate half-cubes are maximizers
};

// Exact maximum of ||sum over x in S of x||^2 over all subsets S of {-1,1}^n,
// brute-forced over 2^(2^n) subsets. n <= 4.
SubsetNormResult subset_norm_max(int n);

}  // namespace badsci
