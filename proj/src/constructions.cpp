#include "badsci/constructions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace badsci {

namespace {

int floor_log2(int n) {
    int k = 0;
    while ((1 << (k + 1)) <= n) ++k;
    return k;
}

}  // namespace

TreeSpec tree_spec(int n) {
    if (n < 2) throw std::invalid_argument("tree_spec requires n >= 2");
    // Heap-indexed complete binary tree with 2n-1 nodes has exactly n leaves,
    // ids n..2n-1. A leaf's root path is its index written in binary without
    // the leading 1 (0 = left, 1 = right); left-to-right leaf order is the
    // lexicographic order of those paths.
    struct Leaf {
        std::vector<int> path;
    };
    std::vector<Leaf> leaves;
    leaves.reserve(n);
    for (int id = n; id <= 2 * n - 1; ++id) {
        Leaf lf;
        int top = 31 - std::countl_zero(static_cast<unsigned>(id));
        for (int b = top - 1; b >= 0; --b) lf.path.push_back((id >> b & 1) ? 1 : -1);
        leaves.push_back(std::move(lf));
    }
    std::sort(leaves.begin(), leaves.end(),
              [](const Leaf& a, const Leaf& b) { return a.path < b.path; });

    TreeSpec spec;
    spec.n = n;
    spec.k = floor_log2(n);
    for (auto& lf : leaves) {
        std::vector<int> labels;
        labels.reserve(lf.path.size() + 1);
        labels.push_back(1);  // edge into the root
        labels.insert(labels.end(), lf.path.begin(), lf.path.end());
        if (static_cast<int>(labels.size()) == spec.k + 2) ++spec.long_row_count;
        spec.leaf_labels.push_back(std::move(labels));
    }
    return spec;
}

Matrix tree_matrix(int n) {
    if (n < 2 || n > 30) throw std::invalid_argument("tree_matrix requires 2 <= n <= 30");
    TreeSpec spec = tree_spec(n);
    std::vector<std::vector<Integer>> rows;
    rows.reserve(n);
    for (const auto& labels : spec.leaf_labels) {
        std::vector<Integer> row(n, 0);
        for (size_t j = 0; j < labels.size(); ++j) row[j] = labels[j];
        rows.push_back(std::move(row));
    }
    return Matrix::from_int_rows(std::move(rows), "tree(" + std::to_string(n) + ")");
}

SurdValue tree_beta_formula(int n) {
    if (n < 2) throw std::invalid_argument("tree_beta_formula requires n >= 2");
    const int k = floor_log2(n);
    const Rational ratio(n, 1L << k);  // n / 2^k in [1, 2)
    SurdValue sk1 = SurdValue::sqrt_of(k + 1);
    SurdValue sk2 = SurdValue::sqrt_of(k + 2);
    return sk1.scaled(2) - sk2 + (sk2 - sk1).scaled(ratio);
}

Matrix lift(const Matrix& a, const BetaResult& beta_a) {
    if (a.m() != a.n()) throw std::invalid_argument("lift requires a square matrix");
    const int n0 = a.n();
    if (a.kind() == RowKind::Float) {
        for (const auto& r : a.float_rows()) {
            double nrm = 0;
            for (double v : r.v) nrm += v * v;
            if (std::abs(std::sqrt(nrm) - 1.0) > 1e-9)
                throw std::invalid_argument("lift requires unit rows");
        }
    }
    const std::string label = "lift(" + (a.label().empty() ? "?" : a.label()) + ")";

    // Integer branch: with beta^2 = P/Q rational and row norms N_i, the lifted
    // row (g*a_i | +-s*e_i) is proportional to an integer vector exactly when
    // P*N_i*Q is a perfect square; then g*a_i scales to u*c_i and s to v with
    // u/v = sqrt(P*N_i*Q)/(N_i*Q).
    if (a.kind() == RowKind::Int && beta_a.exact.has_value()) {
        const SurdValue beta_sq = *beta_a.exact * *beta_a.exact;
        if (beta_sq.is_rational()) {
            const Rational pq = beta_sq.rational_part();
            const Integer P = pq.get_num(), Q = pq.get_den();
            bool ok = P > 0;
            std::vector<std::pair<Integer, Integer>> uv(n0);
            for (int i = 0; ok && i < n0; ++i) {
                const Integer t = P * a.int_rows()[i].norm_sq * Q;
                if (!mpz_perfect_square_p(t.get_mpz_t())) {
                    ok = false;
                    break;
                }
                Integer g;
                mpz_sqrt(g.get_mpz_t(), t.get_mpz_t());
                Rational scale(g, a.int_rows()[i].norm_sq * Q);
                scale.canonicalize();
                uv[i] = {scale.get_num(), scale.get_den()};
            }
            if (ok) {
                std::vector<std::vector<Integer>> rows(2 * n0, std::vector<Integer>(2 * n0, 0));
                for (int i = 0; i < n0; ++i) {
                    const auto& [u, v] = uv[i];
                    for (int j = 0; j < n0; ++j) {
                        rows[i][j] = u * a.int_rows()[i].c[j];
                        rows[n0 + i][j] = rows[i][j];
                    }
                    rows[i][n0 + i] = v;
                    rows[n0 + i][n0 + i] = -v;
                }
                return Matrix::from_int_rows(std::move(rows), label);
            }
        }
    }

    const double beta = beta_a.approx;
    const double gamma = beta / std::sqrt(beta * beta + 1.0);
    const double s = std::sqrt(1.0 - gamma * gamma);
    const auto unit = a.unit_rows_double();
    std::vector<std::vector<double>> rows(2 * n0, std::vector<double>(2 * n0, 0.0));
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n0; ++j) {
            rows[i][j] = gamma * unit[i][j];
            rows[n0 + i][j] = rows[i][j];
        }
        rows[i][n0 + i] = s;
        rows[n0 + i][n0 + i] = -s;
    }
    return Matrix::from_float_rows(std::move(rows), label);
}

Matrix hadamard_power(int k) {
    if (k < 1) throw std::invalid_argument("hadamard_power requires k >= 1");
    if (k > 10) throw std::invalid_argument("hadamard_power capped at k = 10");
    Matrix m = known_matrix("opt2");
    for (int i = 1; i < k; ++i) {
        BetaResult beta;
        beta.exact = SurdValue::sqrt_of(i + 1);  // lift identity along the chain
        beta.approx = beta.exact->to_double();
        beta.engine = Engine::Exact;
        m = lift(m, beta);
    }
    m.set_label("hadamard_power(" + std::to_string(k) + ")");
    return m;
}

Matrix known_matrix(const std::string& name, int n) {
    auto I = [](long v) { return Integer(v); };
    if (name == "opt2") {
        return Matrix::from_int_rows({{I(1), I(1)}, {I(1), I(-1)}}, "opt2");
    }
    if (name == "opt3") {
        // Float form of an exact n=3 optimum (a column permutation of the
        // 3-leaf tree matrix), beta = (sqrt(2)+sqrt(3))/2.
        const double a = 1.0 / std::sqrt(3.0), b = 1.0 / std::sqrt(2.0);
        return Matrix::from_float_rows({{-a, -a, a}, {-a, a, a}, {b, 0.0, b}}, "opt3");
    }
    if (name == "opt4") {
        return Matrix::from_int_rows({{I(1), I(1), I(1), I(0)},
                                      {I(1), I(-1), I(-1), I(0)},
                                      {I(1), I(-1), I(1), I(0)},
                                      {I(1), I(1), I(-1), I(0)}},
                                     "opt4");
    }
    if (name == "best5") {
        return Matrix::from_int_rows({{I(1), I(1), I(0), I(0), I(1)},
                                      {I(-1), I(1), I(0), I(1), I(0)},
                                      {I(-1), I(0), I(0), I(-1), I(1)},
                                      {I(0), I(-1), I(1), I(1), I(1)},
                                      {I(0), I(1), I(1), I(-1), I(-1)}},
                                     "best5");
    }
    if (name == "conj2xn") {
        if (n < 2) throw std::invalid_argument("conj2xn requires n >= 2");
        std::vector<std::vector<Integer>> rows(2, std::vector<Integer>(n, 0));
        rows[0][0] = 1;
        rows[0][1] = 1;
        rows[1][0] = 1;
        rows[1][1] = -1;
        return Matrix::from_int_rows(std::move(rows), "conj2xn(" + std::to_string(n) + ")");
    }
    throw std::invalid_argument("unknown matrix name: " + name +
                                " (expected opt2, opt3, opt4, best5, conj2xn)");
}

Matrix sylvester_hadamard(int k) {
    if (k < 0 || k > 10) throw std::invalid_argument("sylvester_hadamard requires 0 <= k <= 10");
    const int n = 1 << k;
    // H_{ij} = (-1)^{popcount(i & j)}
    std::vector<std::vector<Integer>> rows(n, std::vector<Integer>(n, 1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rows[i][j] = (std::popcount(static_cast<unsigned>(i & j)) % 2) ? -1 : 1;
    return Matrix::from_int_rows(std::move(rows), "hadamard(" + std::to_string(n) + ")");
}

Matrix random_pm_matrix(int n, std::uint64_t seed) {
    if (n < 1 || n > 30) throw std::invalid_argument("random_pm_matrix requires 1 <= n <= 30");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<Integer>> rows(n, std::vector<Integer>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rows[i][j] = (rng() & 1) ? 1 : -1;
    return Matrix::from_int_rows(std::move(rows),
                                 "random_pm(" + std::to_string(n) + "," + std::to_string(seed) + ")");
}

Matrix random_unit_row_matrix(int m, int n, std::uint64_t seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("random_unit_row_matrix: bad shape");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> rows(m, std::vector<double>(n));
    for (int i = 0; i < m; ++i) {
        double nrm = 0;
        do {
            nrm = 0;
            for (int j = 0; j < n; ++j) {
                rows[i][j] = gauss(rng);
                nrm += rows[i][j] * rows[i][j];
            }
        } while (nrm < 1e-12);
    }
    return Matrix::from_float_rows(std::move(rows), "random_unit", /*force_normalize=*/true);
}

}  // namespace badsci
