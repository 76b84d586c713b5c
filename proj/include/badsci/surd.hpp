// Exact arithmetic over rational linear combinations of square roots of integers,
// with a total-order comparison. Values are stored canonically as
//   sum over squarefree d >= 1 of  q_d * sqrt(d),   q_d rational and nonzero,
// which is a unique representation (sqrt(d) over distinct squarefree d are
// linearly independent over the rationals).
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <gmpxx.h>

#include "badsci/errors.hpp"

namespace badsci {

using Integer = mpz_class;
using Rational = mpq_class;

enum class Ordering { Less, Equal, Greater };

// Comparison precision ladder (bits): 64 -> 128 -> 256 -> 1024, then doubling up to the cap.
inline constexpr unsigned kDefaultPrecisionCap = 4096;

// Splits radicand = s^2 * d with d squarefree; returns {s, d}. radicand >= 0.
std::pair<Integer, Integer> squarefree_split(const Integer& radicand);

class SurdValue {
  public:
    SurdValue() = default;  // zero

    static SurdValue zero() { return SurdValue{}; }
    static SurdValue from_rational(const Rational& q);
    static SurdValue from_int(long v) { return from_rational(Rational(v)); }
    // canonicalize(coeff, radicand): coeff * sqrt(radicand) with the square part
    // of the radicand absorbed into the coefficient. radicand 0 yields zero.
    static SurdValue sqrt_term(const Rational& coeff, const Integer& radicand);
    static SurdValue sqrt_of(const Integer& radicand) { return sqrt_term(Rational(1), radicand); }

    // Canonical term map: squarefree radicand -> nonzero coefficient. d = 1 is the rational part.
    const std::map<Integer, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_rational() const;
    Rational rational_part() const;  // coefficient of d = 1 (zero if absent)

    SurdValue operator+(const SurdValue& o) const;
    SurdValue operator-(const SurdValue& o) const;
    SurdValue operator-() const;
    SurdValue operator*(const SurdValue& o) const;
    SurdValue scaled(const Rational& r) const;

    SurdValue& operator+=(const SurdValue& o) { return *this = *this + o; }
    SurdValue& operator-=(const SurdValue& o) { return *this = *this - o; }

    // Canonical-form identity; equivalent to numeric equality.
    bool operator==(const SurdValue& o) const { return terms_ == o.terms_; }
    bool operator!=(const SurdValue& o) const { return !(*this == o); }

    double to_double() const;
    // Rendered as e.g. "1/2 + 3/4*sqrt(3)".
    std::string to_string() const;

    // {"terms": {"1": "1/2", "3": "3/4"}, "approx": 1.799} -- terms authoritative,
    // keys in increasing numeric order. Round-trips through parse_surd_json.
    std::string to_json() const;

  private:
    void insert_term(const Integer& d, const Rational& q);

    std::map<Integer, Rational> terms_;

    friend Ordering compare(const SurdValue&, const SurdValue&, unsigned);
};

// Exact ordering of the represented reals. Equality is canonical-form identity;
// strict order is decided by interval evaluation with doubling precision.
// Throws PrecisionExhausted if distinct canonical forms do not separate below the cap.
Ordering compare(const SurdValue& a, const SurdValue& b,
                 unsigned precision_cap = kDefaultPrecisionCap);

int sign_of(const SurdValue& a, unsigned precision_cap = kDefaultPrecisionCap);

SurdValue parse_surd_json(const std::string& text);

std::string rational_to_string(const Rational& q);
Rational parse_rational(const std::string& text);

}  // namespace badsci
