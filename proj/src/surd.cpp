#include "badsci/surd.hpp"

#include <mpfr.h>

#include <cstdlib>
#include <utility>
#include <vector>

#include <json.hpp>

namespace badsci {

namespace {

// Factor n into primes. Trial division handles everything this artifact
// actually produces (radicands are squared norms of small integer vectors);
// the rho fallback keeps canonicalization exact for oversized inputs.
void factor_into(Integer n, std::vector<std::pair<Integer, unsigned>>& out);

Integer pollard_rho(const Integer& n, unsigned long c0) {
    // Brent's cycle variant.
    Integer x(2), y(2), d(1), c(c0), ys, q(1);
    unsigned long r = 1, m = 128;
    auto step = [&](Integer& v) { v = (v * v + c) % n; };
    while (d == 1) {
        x = y;
        for (unsigned long i = 0; i < r; ++i) step(y);
        unsigned long k = 0;
        while (k < r && d == 1) {
            ys = y;
            unsigned long lim = std::min(m, r - k);
            for (unsigned long i = 0; i < lim; ++i) {
                step(y);
                Integer diff = x - y;
                mpz_abs(diff.get_mpz_t(), diff.get_mpz_t());
                q = q * diff % n;
            }
            mpz_gcd(d.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            k += lim;
        }
        r *= 2;
    }
    if (d == n) {
        // Backtrack one step at a time.
        do {
            step(ys);
            Integer diff = x - ys;
            mpz_abs(diff.get_mpz_t(), diff.get_mpz_t());
            mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        } while (d == 1);
    }
    return d;
}

void factor_into(Integer n, std::vector<std::pair<Integer, unsigned>>& out) {
    if (n <= 1) return;
    for (unsigned long p : {2ul, 3ul, 5ul, 7ul}) {
        unsigned e = 0;
        while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
            ++e;
        }
        if (e) out.emplace_back(Integer(p), e);
    }
    // Wheel over numbers coprime to 2,3 up to 2^16, enough to fully factor
    // anything below 2^32 and to strip small primes off bigger inputs.
    for (unsigned long p = 11; p < (1ul << 16) && n > 1; p += (p % 6 == 5) ? 2 : 4) {
        if (!mpz_divisible_ui_p(n.get_mpz_t(), p)) continue;
        unsigned e = 0;
        do {
            mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
            ++e;
        } while (mpz_divisible_ui_p(n.get_mpz_t(), p));
        out.emplace_back(Integer(p), e);
    }
    if (n == 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 40)) {
        out.emplace_back(n, 1);
        return;
    }
    if (mpz_perfect_square_p(n.get_mpz_t())) {
        Integer r;
        mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
        std::vector<std::pair<Integer, unsigned>> sub;
        factor_into(r, sub);
        for (auto& [p, e] : sub) out.emplace_back(p, 2 * e);
        return;
    }
    Integer d = n;
    for (unsigned long c = 1; d == n; ++c) d = pollard_rho(n, c);
    std::vector<std::pair<Integer, unsigned>> sub;
    factor_into(d, sub);
    factor_into(n / d, sub);
    // Merge duplicate primes from the two branches.
    for (auto& [p, e] : sub) {
        bool merged = false;
        for (auto& [q, f] : out) {
            if (q == p) {
                f += e;
                merged = true;
                break;
            }
        }
        if (!merged) out.emplace_back(p, e);
    }
}

class MpfrValue {
  public:
    explicit MpfrValue(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    ~MpfrValue() { mpfr_clear(v_); }
    MpfrValue(const MpfrValue&) = delete;
    MpfrValue& operator=(const MpfrValue&) = delete;
    mpfr_ptr get() { return v_; }

  private:
    mpfr_t v_;
};

// [lo, hi] enclosure of sum q_d * sqrt(d) at the given working precision.
void eval_interval(const std::map<Integer, Rational>& terms, mpfr_prec_t prec,
                   mpfr_ptr lo, mpfr_ptr hi) {
    mpfr_set_zero(lo, 1);
    mpfr_set_zero(hi, 1);
    MpfrValue root_lo(prec), root_hi(prec), term_lo(prec), term_hi(prec);
    for (const auto& [d, q] : terms) {
        if (d == 1) {
            mpfr_set_q(term_lo.get(), q.get_mpq_t(), MPFR_RNDD);
            mpfr_set_q(term_hi.get(), q.get_mpq_t(), MPFR_RNDU);
        } else {
            mpfr_set_z(root_lo.get(), d.get_mpz_t(), MPFR_RNDD);
            mpfr_sqrt(root_lo.get(), root_lo.get(), MPFR_RNDD);
            mpfr_set_z(root_hi.get(), d.get_mpz_t(), MPFR_RNDU);
            mpfr_sqrt(root_hi.get(), root_hi.get(), MPFR_RNDU);
            if (sgn(q) > 0) {
                mpfr_mul_q(term_lo.get(), root_lo.get(), q.get_mpq_t(), MPFR_RNDD);
                mpfr_mul_q(term_hi.get(), root_hi.get(), q.get_mpq_t(), MPFR_RNDU);
            } else {
                mpfr_mul_q(term_lo.get(), root_hi.get(), q.get_mpq_t(), MPFR_RNDD);
                mpfr_mul_q(term_hi.get(), root_lo.get(), q.get_mpq_t(), MPFR_RNDU);
            }
        }
        mpfr_add(lo, lo, term_lo.get(), MPFR_RNDD);
        mpfr_add(hi, hi, term_hi.get(), MPFR_RNDU);
    }
}

}  // namespace

std::pair<Integer, Integer> squarefree_split(const Integer& radicand) {
    if (radicand < 0) throw std::invalid_argument("squarefree_split: negative radicand");
    if (radicand == 0) return {Integer(0), Integer(1)};
    if (radicand == 1) return {Integer(1), Integer(1)};
    std::vector<std::pair<Integer, unsigned>> raw;
    Integer n = radicand;
    factor_into(std::move(n), raw);
    std::map<Integer, unsigned> factors;
    for (const auto& [p, e] : raw) factors[p] += e;
    Integer square_root(1), squarefree(1);
    for (const auto& [p, e] : factors) {
        if (e / 2 > 0) {
            Integer pe;
            mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e / 2);
            square_root *= pe;
        }
        if (e % 2) squarefree *= p;
    }
    return {square_root, squarefree};
}

void SurdValue::insert_term(const Integer& d, const Rational& q) {
    if (q == 0) return;
    auto [it, inserted] = terms_.emplace(d, q);
    if (!inserted) {
        it->second += q;
        if (it->second == 0) terms_.erase(it);
    }
}

SurdValue SurdValue::from_rational(const Rational& q) {
    SurdValue s;
    Rational c = q;
    c.canonicalize();
    s.insert_term(Integer(1), c);
    return s;
}

SurdValue SurdValue::sqrt_term(const Rational& coeff, const Integer& radicand) {
    auto [root, d] = squarefree_split(radicand);
    if (root == 0) return SurdValue{};  // radicand 0
    SurdValue s;
    Rational c = coeff;
    c.canonicalize();  // mpq arithmetic requires canonical operands
    c *= root;
    c.canonicalize();
    s.insert_term(d, c);
    return s;
}

bool SurdValue::is_rational() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && terms_.begin()->first == 1;
}

Rational SurdValue::rational_part() const {
    auto it = terms_.find(Integer(1));
    return it == terms_.end() ? Rational(0) : it->second;
}

SurdValue SurdValue::operator+(const SurdValue& o) const {
    SurdValue r = *this;
    for (const auto& [d, q] : o.terms_) r.insert_term(d, q);
    return r;
}

SurdValue SurdValue::operator-(const SurdValue& o) const {
    SurdValue r = *this;
    for (const auto& [d, q] : o.terms_) r.insert_term(d, -q);
    return r;
}

SurdValue SurdValue::operator-() const {
    SurdValue r;
    for (const auto& [d, q] : terms_) r.terms_.emplace(d, -q);
    return r;
}

SurdValue SurdValue::operator*(const SurdValue& o) const {
    // sqrt(d1)*sqrt(d2) = g*sqrt((d1/g)(d2/g)) with g = gcd; both factors stay
    // squarefree and coprime, so no re-factoring is needed.
    SurdValue r;
    for (const auto& [d1, q1] : terms_) {
        for (const auto& [d2, q2] : o.terms_) {
            Integer g;
            mpz_gcd(g.get_mpz_t(), d1.get_mpz_t(), d2.get_mpz_t());
            Integer d = (d1 / g) * (d2 / g);
            Rational q = q1 * q2 * g;
            q.canonicalize();
            r.insert_term(d, q);
        }
    }
    return r;
}

SurdValue SurdValue::scaled(const Rational& r) const {
    SurdValue s;
    if (r == 0) return s;
    for (const auto& [d, q] : terms_) {
        Rational c = q * r;
        c.canonicalize();
        s.terms_.emplace(d, c);
    }
    return s;
}

double SurdValue::to_double() const {
    if (terms_.empty()) return 0.0;
    MpfrValue acc(128), root(128), term(128);
    mpfr_set_zero(acc.get(), 1);
    for (const auto& [d, q] : terms_) {
        if (d == 1) {
            mpfr_set_q(term.get(), q.get_mpq_t(), MPFR_RNDN);
        } else {
            mpfr_set_z(root.get(), d.get_mpz_t(), MPFR_RNDN);
            mpfr_sqrt(root.get(), root.get(), MPFR_RNDN);
            mpfr_mul_q(term.get(), root.get(), q.get_mpq_t(), MPFR_RNDN);
        }
        mpfr_add(acc.get(), acc.get(), term.get(), MPFR_RNDN);
    }
    return mpfr_get_d(acc.get(), MPFR_RNDN);
}

std::string rational_to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& text) {
    Rational q;
    if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0)
        throw ParseError("invalid rational: " + text);
    if (q.get_den() == 0) throw ParseError("zero denominator: " + text);
    q.canonicalize();
    return q;
}

std::string SurdValue::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [d, q] : terms_) {
        Rational a = abs(q);
        if (first) {
            if (sgn(q) < 0) out += "-";
            first = false;
        } else {
            out += sgn(q) < 0 ? " - " : " + ";
        }
        if (d == 1) {
            out += rational_to_string(a);
        } else {
            if (a != 1) out += rational_to_string(a) + "*";
            out += "sqrt(" + d.get_str() + ")";
        }
    }
    return out;
}

std::string SurdValue::to_json() const {
    nlohmann::ordered_json j;
    j["terms"] = nlohmann::ordered_json::object();
    for (const auto& [d, q] : terms_) j["terms"][d.get_str()] = rational_to_string(q);
    j["approx"] = to_double();
    return j.dump();
}

SurdValue parse_surd_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad surd JSON: ") + e.what());
    }
    if (!j.contains("terms") || !j["terms"].is_object())
        throw ParseError("surd JSON missing \"terms\" object");
    SurdValue v;
    for (const auto& [key, val] : j["terms"].items()) {
        Integer d;
        if (mpz_set_str(d.get_mpz_t(), key.c_str(), 10) != 0 || d < 1)
            throw ParseError("bad radicand key: " + key);
        if (!val.is_string()) throw ParseError("coefficient must be a string: " + key);
        // Radicands are re-canonicalized, so non-squarefree input keys are accepted.
        v += SurdValue::sqrt_term(parse_rational(val.get<std::string>()), d);
    }
    return v;
}

Ordering compare(const SurdValue& a, const SurdValue& b, unsigned precision_cap) {
    if (a.terms_ == b.terms_) return Ordering::Equal;
    SurdValue diff = a - b;
    if (diff.is_rational()) {
        return sgn(diff.rational_part()) > 0 ? Ordering::Greater : Ordering::Less;
    }
    if (precision_cap < 64) precision_cap = 64;
    std::vector<unsigned> ladder;
    for (unsigned p : {64u, 128u, 256u, 1024u})
        if (p <= precision_cap) ladder.push_back(p);
    unsigned p = ladder.empty() ? 0 : ladder.back();
    while (p && p < precision_cap) {
        p = std::min(p * 2, precision_cap);
        ladder.push_back(p);
    }
    if (ladder.empty()) ladder.push_back(precision_cap);
    for (unsigned prec : ladder) {
        MpfrValue lo(prec), hi(prec);
        eval_interval(diff.terms_, prec, lo.get(), hi.get());
        if (mpfr_sgn(lo.get()) > 0) return Ordering::Greater;
        if (mpfr_sgn(hi.get()) < 0) return Ordering::Less;
    }
    throw PrecisionExhausted("surd comparison did not separate below " +
                             std::to_string(precision_cap) + " bits; raise the precision cap");
}

int sign_of(const SurdValue& a, unsigned precision_cap) {
    if (a.is_zero()) return 0;
    switch (compare(a, SurdValue::zero(), precision_cap)) {
        case Ordering::Less: return -1;
        case Ordering::Greater: return 1;
        default: return 0;
    }
}

}  // namespace badsci
