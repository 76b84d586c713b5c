#include <doctest.h>

#include <cmath>
#include <random>

#include "badsci/constructions.hpp"
#include "badsci/eval.hpp"

using namespace badsci;

TEST_SUITE_BEGIN("constructions");

namespace {
std::vector<Integer> iv(std::initializer_list<long> xs) {
    return std::vector<Integer>(xs.begin(), xs.end());
}
}  // namespace

TEST_CASE("tree spec shape") {
    for (int n = 2; n <= 16; ++n) {
        TreeSpec spec = tree_spec(n);
        CHECK(spec.n == n);
        CHECK(static_cast<int>(spec.leaf_labels.size()) == n);
        const int k = spec.k;
        CHECK((1 << k) <= n);
        CHECK(n < (1 << (k + 1)));
        int longs = 0;
        for (const auto& labels : spec.leaf_labels) {
            const int len = static_cast<int>(labels.size());
            CHECK((len == k + 1 || len == k + 2));
            CHECK(labels.front() == 1);  // edge into the root
            longs += len == k + 2;
        }
        CHECK(longs == spec.long_row_count);
        CHECK(longs == ((n == (1 << k)) ? 0 : 2 * (n - (1 << k))));
    }
}

TEST_CASE("tree matrices for n = 2, 4, 5") {
    Matrix t2 = tree_matrix(2);
    CHECK(t2.int_rows()[0].c == iv({1, -1}));
    CHECK(t2.int_rows()[1].c == iv({1, 1}));

    Matrix t4 = tree_matrix(4);
    CHECK(t4.int_rows()[0].c == iv({1, -1, -1, 0}));
    CHECK(t4.int_rows()[1].c == iv({1, -1, 1, 0}));
    CHECK(t4.int_rows()[2].c == iv({1, 1, -1, 0}));
    CHECK(t4.int_rows()[3].c == iv({1, 1, 1, 0}));
    for (const auto& r : t4.int_rows()) CHECK(r.norm_sq == 3);

    Matrix t5 = tree_matrix(5);
    CHECK(t5.int_rows()[0].c == iv({1, -1, -1, -1, 0}));
    CHECK(t5.int_rows()[1].c == iv({1, -1, -1, 1, 0}));
    CHECK(t5.int_rows()[2].c == iv({1, -1, 1, 0, 0}));
    CHECK(t5.int_rows()[3].c == iv({1, 1, -1, 0, 0}));
    CHECK(t5.int_rows()[4].c == iv({1, 1, 1, 0, 0}));

    CHECK_THROWS_AS(tree_matrix(1), std::invalid_argument);
}

TEST_CASE("tree closed form at n = 3, 5, 8") {
    SurdValue r2 = SurdValue::sqrt_of(Integer(2)), r3 = SurdValue::sqrt_of(Integer(3));
    CHECK(tree_beta_formula(3) == (r2 + r3).scaled(Rational(1, 2)));
    CHECK(tree_beta_formula(5) ==
          SurdValue::from_rational(Rational(1, 2)) + r3.scaled(Rational(3, 4)));
    CHECK(tree_beta_formula(8) == SurdValue::from_int(2));
    CHECK(tree_beta_formula(5).to_double() == doctest::Approx(1.7990381).epsilon(1e-6));
}

TEST_CASE("tree formula equals exact enumeration for 2 <= n <= 12") {
    for (int n = 2; n <= 12; ++n)
        CHECK(tree_beta_formula(n) == *beta_exact(tree_matrix(n)).exact);
}

TEST_CASE("tree image magnitudes are sqrt(k+1) or sqrt(k+2) only") {
    for (int n : {3, 5, 6, 7, 11, 8, 16}) {
        const int k = n >= 16 ? 4 : (n >= 8 ? 3 : (n >= 4 ? 2 : 1));
        auto rep = partition(tree_matrix(n));
        const bool power_of_two = (n & (n - 1)) == 0;
        REQUIRE(rep.histogram.size() == (power_of_two ? 1u : 2u));
        CHECK(*rep.histogram[0].value == SurdValue::sqrt_of(Integer(k + 1)));
        if (!power_of_two) CHECK(*rep.histogram[1].value == SurdValue::sqrt_of(Integer(k + 2)));
    }
}

TEST_CASE("lift of the 2x2 optimum is the 4x4 optimum") {
    Matrix h2 = known_matrix("opt2");
    auto beta2 = beta_exact(h2);
    Matrix l = lift(h2, beta2);
    CHECK(l.kind() == RowKind::Int);
    CHECK(l.m() == 4);
    for (const auto& r : l.int_rows()) {
        CHECK(r.norm_sq == 3);
        for (const auto& e : r.c) CHECK(abs(e) <= 1);
    }
    auto beta4 = beta_exact(l);
    CHECK(*beta4.exact == SurdValue::sqrt_of(Integer(3)));

    Matrix l2 = lift(l, beta4);
    CHECK(*beta_exact(l2).exact == SurdValue::from_int(2));
}

TEST_CASE("lift identity beta(B)^2 = beta(A)^2 + 1 for random float matrices") {
    std::mt19937_64 rng(17);
    for (int it = 0; it < 20; ++it) {
        const int n0 = 2 + it % 3;
        Matrix a = random_unit_row_matrix(n0, n0, rng());
        auto ba = beta_float(a);
        Matrix b = lift(a, ba);
        CHECK(b.kind() == RowKind::Float);
        CHECK(b.m() == 2 * n0);
        for (const auto& r : b.float_rows()) {
            double nrm = 0;
            for (double v : r.v) nrm += v * v;
            CHECK(std::abs(std::sqrt(nrm) - 1.0) <= 1e-12);
        }
        const double bb = beta_float(b).approx;
        CHECK(bb * bb == doctest::Approx(ba.approx * ba.approx + 1.0).epsilon(1e-9));
    }
}

TEST_CASE("lift falls back to float when the scaled rows are not integer directions") {
    Matrix t3 = tree_matrix(3);  // beta^2 = (5 + 2*sqrt(6))/4, irrational
    auto b = beta_exact(t3);
    Matrix l = lift(t3, b);
    CHECK(l.kind() == RowKind::Float);
    CHECK(beta_float(l).approx * beta_float(l).approx ==
          doctest::Approx(b.approx * b.approx + 1.0).epsilon(1e-9));
}

TEST_CASE("lift rejects rectangular input") {
    Matrix wide = known_matrix("conj2xn", 3);
    CHECK_THROWS_AS((void)lift(wide, beta_exact(wide)), std::invalid_argument);
}

TEST_CASE("hadamard power family") {
    for (int k = 1; k <= 4; ++k) {
        Matrix h = hadamard_power(k);
        CHECK(h.kind() == RowKind::Int);
        CHECK(h.m() == (1 << k));
        for (const auto& r : h.int_rows()) {
            CHECK(r.norm_sq == k + 1);
            for (const auto& e : r.c) CHECK(abs(e) <= 1);
        }
        CHECK(*beta_exact(h).exact == SurdValue::sqrt_of(Integer(k + 1)));
    }
    CHECK_THROWS_AS(hadamard_power(0), std::invalid_argument);
}

TEST_CASE("known matrices") {
    Matrix opt4 = known_matrix("opt4");
    CHECK(opt4.m() == 4);
    for (const auto& r : opt4.int_rows()) CHECK(r.norm_sq == 3);
    CHECK(*beta_exact(opt4).exact == SurdValue::sqrt_of(Integer(3)));

    Matrix opt3 = known_matrix("opt3");
    CHECK(opt3.kind() == RowKind::Float);
    CHECK(beta_float(opt3).approx ==
          doctest::Approx((std::sqrt(2.0) + std::sqrt(3.0)) / 2).epsilon(1e-9));

    CHECK(*beta_exact(known_matrix("best5")).exact ==
          SurdValue::from_rational(Rational(1, 2)) +
              SurdValue::sqrt_term(Rational(3, 4), Integer(3)));

    Matrix c7 = known_matrix("conj2xn", 7);
    CHECK(c7.m() == 2);
    CHECK(c7.n() == 7);
    CHECK(beta_float(c7).approx == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(known_matrix("nope"), std::invalid_argument);
    CHECK_THROWS_AS(known_matrix("conj2xn", 1), std::invalid_argument);
}

TEST_CASE("sylvester hadamard rows are orthogonal") {
    for (int k = 1; k <= 3; ++k) {
        Matrix h = sylvester_hadamard(k);
        const int n = 1 << k;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Integer dot = 0;
                for (int t = 0; t < n; ++t) dot += h.int_rows()[i].c[t] * h.int_rows()[j].c[t];
                CHECK(dot == (i == j ? Integer(n) : Integer(0)));
            }
    }
}

TEST_CASE("random +-1 matrices are deterministic and unit-row") {
    Matrix a = random_pm_matrix(8, 42), b = random_pm_matrix(8, 42), c = random_pm_matrix(8, 43);
    CHECK(a == b);
    CHECK(!(a == c));
    for (const auto& r : a.int_rows()) CHECK(r.norm_sq == 8);
    for (std::uint64_t seed : {1ull, 7ull, 99ull}) {
        const double beta = beta_float(random_pm_matrix(8, seed)).approx;
        CHECK(beta >= 1.0);
        CHECK(beta <= std::sqrt(8.0) + 1e-9);
    }
}

TEST_SUITE_END();
