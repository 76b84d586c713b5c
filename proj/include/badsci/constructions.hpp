// Generators for the explicit matrix families: the block lifting step, the
// k-fold lifted Hadamard-power family, highly balanced binary tree matrices
// with their closed-form objective, the known small optima, the conjectured
// 2xn family, and random +-1/sqrt(n) matrices.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "badsci/eval.hpp"
#include "badsci/matrix.hpp"

namespace badsci {

// Root-to-leaf +-1 label sequences of the highly balanced binary tree with n
// leaves (filled left to right, plus an edge into the root labeled +1; left
// edges -1, right edges +1). Sequences are ordered by leaf position.
struct TreeSpec {
    int n = 0;
    int k = 0;                                  // floor(log2(n))
    std::vector<std::vector<int>> leaf_labels;  // lengths k+1 and (when n is not a power of 2) k+2
    int long_row_count = 0;                     // 2*(n - 2^k), 0 at powers of two
};

TreeSpec tree_spec(int n);

// n x n integer-form matrix whose i-th row is leaf i's label sequence padded
// with zeros. Requires 2 <= n <= 30.
Matrix tree_matrix(int n);

// Closed form for beta(tree_matrix(n)):
//   (2*sqrt(k+1) - sqrt(k+2)) + (n/2^k)*(sqrt(k+2) - sqrt(k+1)),  k = floor(log2 n),
// which collapses to sqrt(k+1) when n = 2^k.
SurdValue tree_beta_formula(int n);

// The doubling step: B = [g*A, s*Id; g*A, -s*Id] with g = beta/sqrt(beta^2+1),
// s = sqrt(1-g^2), so beta(B) = sqrt(beta(A)^2 + 1). `beta_a` is the caller's
// already-computed objective (exact preferred) so lift chains do not
// re-enumerate. Output stays integer-form when every row of g*A joined with
// s*e_i is proportional to an integer vector; otherwise float-form.
Matrix lift(const Matrix& a, const BetaResult& beta_a);

// k-fold lift of the optimal 2x2 matrix: 2^k x 2^k, entries in {-1,0,1} over
// sqrt(k+1), beta = sqrt(k+1).
Matrix hadamard_power(int k);

// Literal matrices: "opt2", "opt3" (float form), "opt4", "best5", and
// "conj2xn" (requires n >= 2).
Matrix known_matrix(const std::string& name, int n = 0);

// Sylvester Hadamard matrix of order 2^k scaled to unit rows (integer form),
// used as the orthogonal test family.
Matrix sylvester_hadamard(int k);

// n x n matrix with entries +-1 (unit rows with N = n), deterministic in seed.
Matrix random_pm_matrix(int n, std::uint64_t seed);

// Random unit float row via seeded Gaussian sampling (demo/test helper).
Matrix random_unit_row_matrix(int m, int n, std::uint64_t seed);

}  // namespace badsci
