#include <doctest.h>

#include <mpfr.h>

#include <random>

#include "badsci/surd.hpp"

using namespace badsci;

TEST_SUITE_BEGIN("surd");

TEST_CASE("canonicalization absorbs square parts") {
    SurdValue v = SurdValue::sqrt_term(Rational(3), Integer(8));  // 3*sqrt(8) = 6*sqrt(2)
    REQUIRE(v.terms().size() == 1);
    CHECK(v.terms().begin()->first == 2);
    CHECK(v.terms().begin()->second == Rational(6));
    CHECK(v == SurdValue::sqrt_term(Rational(6), Integer(2)));

    SurdValue w = SurdValue::sqrt_of(Integer(4));  // perfect square -> rational 2
    CHECK(w.is_rational());
    CHECK(w.rational_part() == Rational(2));

    CHECK(SurdValue::sqrt_of(Integer(0)).is_zero());
    CHECK(SurdValue::sqrt_of(Integer(1)).rational_part() == 1);
}

TEST_CASE("termwise assembly of (2 + 3*sqrt(3))/4") {
    SurdValue v = (SurdValue::from_int(2) + SurdValue::sqrt_term(Rational(3), Integer(3)))
                      .scaled(Rational(1, 4));
    REQUIRE(v.terms().size() == 2);
    CHECK(v.terms().at(Integer(1)) == Rational(1, 2));
    CHECK(v.terms().at(Integer(3)) == Rational(3, 4));

    SurdValue w = SurdValue::sqrt_of(Integer(3)).scaled(Rational(3, 4)) +
                  SurdValue::from_rational(Rational(1, 2));
    CHECK(v == w);
    CHECK(v.to_string() == "1/2 + 3/4*sqrt(3)");
}

TEST_CASE("add/sub collapse like terms") {
    SurdValue r2 = SurdValue::sqrt_of(Integer(2));
    SurdValue r3 = SurdValue::sqrt_of(Integer(3));
    CHECK((r2 + r2) == r2.scaled(Rational(2)));
    CHECK(((r2 + r3).scaled(Rational(1, 2)) - r3.scaled(Rational(1, 2))) ==
          r2.scaled(Rational(1, 2)));
    CHECK((r2 - r2).is_zero());
    CHECK((r2 - r2).to_string() == "0");
}

TEST_CASE("products re-canonicalize radicands") {
    SurdValue r2 = SurdValue::sqrt_of(Integer(2));
    SurdValue r3 = SurdValue::sqrt_of(Integer(3));
    SurdValue r6 = SurdValue::sqrt_of(Integer(6));
    CHECK((r2 * r3) == r6);
    CHECK((r2 * r2).rational_part() == 2);
    // (sqrt2 + sqrt3)^2 = 5 + 2*sqrt(6)
    SurdValue s = (r2 + r3) * (r2 + r3);
    CHECK(s == SurdValue::from_int(5) + r6.scaled(Rational(2)));
    SurdValue half_sum = (r2 + r3).scaled(Rational(1, 2));
    CHECK((half_sum * half_sum).is_rational() == false);
}

TEST_CASE("comparison: examples") {
    SurdValue r2 = SurdValue::sqrt_of(Integer(2));
    SurdValue r3 = SurdValue::sqrt_of(Integer(3));
    CHECK(compare(r2, SurdValue::from_rational(Rational(3, 2))) == Ordering::Less);
    CHECK(compare((r2 + r3).scaled(Rational(1, 2)), r3) == Ordering::Less);
    CHECK(compare(SurdValue::sqrt_term(Rational(6), Integer(2)),
                  SurdValue::sqrt_term(Rational(3), Integer(8))) == Ordering::Equal);
    CHECK(sign_of(r2 - r3) == -1);
    CHECK(sign_of(SurdValue::zero()) == 0);
}

TEST_CASE("comparison separates a tight rational approximation or throws") {
    // Continued-fraction convergent of sqrt(2): p/q with q ~ 2^40 sits within
    // ~2^-82 of sqrt(2), beyond what 64-bit intervals can split.
    Integer p = 1, q = 1;
    while (q < (Integer(1) << 40)) {
        Integer np = p + 2 * q, nq = p + q;
        p = np;
        q = nq;
    }
    SurdValue approx = SurdValue::from_rational(Rational(p, q));
    SurdValue r2 = SurdValue::sqrt_of(Integer(2));
    CHECK_THROWS_AS((void)compare(r2, approx, 64), PrecisionExhausted);
    // p^2 - 2q^2 = +-1 tells which side the convergent lies on.
    const bool p_above = p * p > 2 * q * q;
    CHECK(compare(r2, approx, 256) == (p_above ? Ordering::Less : Ordering::Greater));
    CHECK(compare(r2, approx) == (p_above ? Ordering::Less : Ordering::Greater));
}

namespace {

SurdValue random_surd(std::mt19937_64& rng) {
    static const int radicands[] = {1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 23, 29};
    std::uniform_int_distribution<int> num(-100, 100), den(1, 10), terms(1, 4), pick(0, 15);
    SurdValue v;
    const int k = terms(rng);
    for (int t = 0; t < k; ++t) {
        int nu = num(rng);
        if (nu == 0) nu = 1;
        v += SurdValue::sqrt_term(Rational(nu, den(rng)), Integer(radicands[pick(rng)]));
    }
    return v;
}

// reference evaluation at 256 bits, round-to-nearest
double eval_256(const SurdValue& v, double* err_scale) {
    mpfr_t acc, root, term;
    mpfr_inits2(256, acc, root, term, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_zero(acc, 1);
    double magnitude = 0;
    for (const auto& [d, q] : v.terms()) {
        mpfr_set_z(root, d.get_mpz_t(), MPFR_RNDN);
        mpfr_sqrt(root, root, MPFR_RNDN);
        mpfr_mul_q(term, root, q.get_mpq_t(), MPFR_RNDN);
        mpfr_add(acc, acc, term, MPFR_RNDN);
        magnitude += std::abs(mpfr_get_d(term, MPFR_RNDN));
    }
    const double out = mpfr_get_d(acc, MPFR_RNDN);
    mpfr_clears(acc, root, term, static_cast<mpfr_ptr>(nullptr));
    *err_scale = magnitude;
    return out;
}

}  // namespace

TEST_CASE("comparison agrees with 256-bit evaluation on random values") {
    std::mt19937_64 rng(7);
    int decided = 0;
    for (int it = 0; it < 10000; ++it) {
        SurdValue a = random_surd(rng), b = random_surd(rng);
        double sa, sb;
        const double fa = eval_256(a, &sa), fb = eval_256(b, &sb);
        const Ordering ord = compare(a, b);
        if (std::abs(fa - fb) > 1e-40 * std::max(1.0, sa + sb)) {
            ++decided;
            CHECK(ord == (fa < fb ? Ordering::Less : Ordering::Greater));
        } else {
            CHECK(ord == Ordering::Equal);
            CHECK(a == b);
        }
    }
    CHECK(decided > 9000);  // random pairs are almost never equal
}

TEST_CASE("canonical uniqueness: equal iff identical term maps") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 200; ++it) {
        SurdValue a = random_surd(rng);
        SurdValue b = random_surd(rng);
        CHECK((compare(a, b) == Ordering::Equal) == (a.terms() == b.terms()));
        CHECK(compare(a, a) == Ordering::Equal);
        CHECK(compare(a + b, b + a) == Ordering::Equal);
    }
}

TEST_CASE("arithmetic matches double arithmetic within rounding") {
    std::mt19937_64 rng(13);
    for (int it = 0; it < 500; ++it) {
        SurdValue a = random_surd(rng), b = random_surd(rng);
        CHECK((a + b).to_double() == doctest::Approx(a.to_double() + b.to_double()).epsilon(1e-12));
        CHECK((a - b).to_double() == doctest::Approx(a.to_double() - b.to_double()).epsilon(1e-12));
        CHECK(a.scaled(Rational(3, 7)).to_double() ==
              doctest::Approx(a.to_double() * 3.0 / 7.0).epsilon(1e-12));
    }
}

TEST_CASE("json round-trip and non-canonical input keys") {
    SurdValue v = SurdValue::from_rational(Rational(1, 2)) +
                  SurdValue::sqrt_term(Rational(3, 4), Integer(3));
    CHECK(parse_surd_json(v.to_json()) == v);

    SurdValue w = parse_surd_json(R"({"terms": {"8": "1"}})");
    CHECK(w == SurdValue::sqrt_term(Rational(2), Integer(2)));

    CHECK_THROWS_AS(parse_surd_json("not json"), ParseError);
    CHECK_THROWS_AS(parse_surd_json(R"({"terms": {"-3": "1"}})"), ParseError);
    CHECK_THROWS_AS(parse_surd_json(R"({"terms": {"3": "1/0"}})"), ParseError);
    CHECK_THROWS_AS(parse_surd_json(R"({"approx": 1.0})"), ParseError);
}

TEST_CASE("squarefree split handles large composites") {
    // 2^2 * 3^3 * 101^2 * 79
    Integer r = Integer(4) * 27 * 101 * 101 * 79;
    auto [s, d] = squarefree_split(r);
    CHECK(s == Integer(2) * 3 * 101);
    CHECK(d == Integer(3) * 79);
    // product of two 33-bit primes, squared times a prime
    Integer p1("8589934583"), p2("8589934621");
    auto [s2, d2] = squarefree_split(p1 * p1 * p2);
    CHECK(s2 == p1);
    CHECK(d2 == p2);
}

TEST_SUITE_END();
