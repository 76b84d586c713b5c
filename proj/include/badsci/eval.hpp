// Objective evaluation by full hypercube enumeration:
//   beta(A) = 2^-n * sum over x in {-1,1}^n of ||Ax||_inf
// plus the winner partition W_i and the lp variants. The exact engine works in
// pure integer arithmetic per vertex and canonicalizes to a SurdValue once at
// the end; the float engine walks vertices in Gray-code order with O(m)
// incremental dot-product updates.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "badsci/matrix.hpp"
#include "badsci/surd.hpp"

namespace badsci {

struct EvalOptions {
    int threads = 1;   // 0 = hardware concurrency; results identical regardless
    int max_n = 30;    // enumeration cap, 2^n vertices
    int partition_sets_max_n = 24;  // keep explicit W_i vertex lists up to this n
};

enum class Engine { Exact, Float };

struct BetaResult {
    std::optional<SurdValue> exact;  // present for the exact engine
    double approx = 0.0;
    Engine engine = Engine::Float;
    std::uint64_t vertex_count = 0;
};

struct PartitionReport {
    struct Bucket {
        std::optional<SurdValue> value;  // exact attained ||Ax||_inf (exact engine)
        double approx = 0.0;
        std::uint64_t count = 0;
    };

    // W_i = vertices whose max |coordinate of Ax| is attained at row i,
    // ties to the smallest row index. Disjoint, cover the cube, closed
    // under x -> -x.
    std::vector<std::vector<VertexMask>> sets;
    bool sets_complete = false;  // false when n exceeds partition_sets_max_n
    std::vector<std::uint64_t> set_sizes;
    std::vector<Bucket> histogram;  // attained value -> vertex count, ascending
    BetaResult beta;
};

BetaResult beta_exact(const Matrix& a, const EvalOptions& opts = {});
BetaResult beta_float(const Matrix& a, const EvalOptions& opts = {});
// exact iff all rows are integer-form
BetaResult beta_auto(const Matrix& a, const EvalOptions& opts = {});

PartitionReport partition(const Matrix& a, const EvalOptions& opts = {});

// 2^-n * sum ||Ax||_p in double precision; p = infinity delegates to beta_float.
double lp_beta(const Matrix& a, double p, const EvalOptions& opts = {});

// (n * 2^(p/2) * Gamma(p/2 + 1))^(1/p), the Khintchine moment bound on the
// averaged lp objective; requires p > 2.
double khintchine_bound(int n, double p);

}  // namespace badsci
